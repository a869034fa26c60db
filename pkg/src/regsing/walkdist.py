"""Step distribution of the zero-sum histogram walk and its exact n-step law.

A step is the histogram (length-p count vector) of a uniformly random
d-tuple over F_p whose entries sum to zero mod p.  There are p**(d-1)
such tuples; the support compresses to the distinct histograms
("atoms"): compositions u of d into p parts with sum_j j*u_j = 0 mod p,
each carrying multiplicity d!/prod_k u_k!.

The n-step endpoint table holds exact big-integer counts: entry m is
p**(n(d-1)) * P(S_n = m), i.e. the number of ordered atom sequences
(with multiplicity) summing to m.  It is built by n sequential
convolutions so every intermediate table is available too.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .errors import DomainError, ShapeError
from .gfcore import require_prime


@dataclass(frozen=True)
class SupportTable:
    """Compressed step support: (histogram, multiplicity) pairs in lex order."""

    d: int
    p: int
    atoms: tuple[tuple[tuple[int, ...], int], ...]

    @property
    def total(self) -> int:
        return self.p ** (self.d - 1)


@dataclass(frozen=True)
class MomentData:
    mean: tuple[Fraction, ...]
    cov: tuple[tuple[Fraction, ...], ...]


@dataclass(frozen=True)
class LatticeDistribution:
    d: int
    p: int
    n: int
    table: dict[tuple[int, ...], int]
    exact: bool = True


def phi(vector: Sequence[int], p) -> tuple[int, ...]:
    """Histogram of symbol frequencies of a vector over F_p."""
    p = require_prime(p)
    counts = [0] * p
    for i, x in enumerate(vector):
        x = int(x)
        if not 0 <= x < p:
            raise DomainError(f"entry {x} at index {i} is outside [0, {p})")
        counts[x] += 1
    return tuple(counts)


def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All tuples of `parts` nonnegative ints summing to `total`, lex order."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in compositions(total - head, parts - 1):
            yield (head,) + tail


def build_support(d: int, p) -> SupportTable:
    """Enumerate the atoms of the step distribution for parameters (d, p)."""
    p = require_prime(p)
    if d < 1:
        raise DomainError(f"d must be >= 1, got {d}")
    fact = math.factorial
    atoms = []
    for u in compositions(d, p):
        if sum(j * uj for j, uj in enumerate(u)) % p:
            continue
        mult = fact(d)
        for uj in u:
            mult //= fact(uj)
        atoms.append((u, mult))
    return SupportTable(d=d, p=p, atoms=tuple(atoms))


def moments(s: SupportTable) -> MomentData:
    """Exact rational mean vector and covariance matrix of one step."""
    total = s.total
    mean = [Fraction(0)] * s.p
    raw2 = [[Fraction(0)] * s.p for _ in range(s.p)]
    for u, mult in s.atoms:
        for j in range(s.p):
            if u[j]:
                mean[j] += Fraction(mult * u[j], total)
                for k in range(s.p):
                    if u[k]:
                        raw2[j][k] += Fraction(mult * u[j] * u[k], total)
    cov = tuple(
        tuple(raw2[j][k] - mean[j] * mean[k] for k in range(s.p)) for j in range(s.p)
    )
    return MomentData(mean=tuple(mean), cov=cov)


def char_fn(s: SupportTable, t: Sequence[float]) -> complex:
    """Characteristic function E[exp(i<t, X>)] of one step."""
    t = np.asarray(t, dtype=float)
    if t.shape != (s.p,):
        raise ShapeError(f"t must have length {s.p}")
    u = np.array([a for a, _ in s.atoms], dtype=float)
    w = np.array([m for _, m in s.atoms], dtype=float)
    return complex(np.sum(w * np.exp(1j * (u @ t))) / s.total)


def char_fn_centered(s: SupportTable, t: Sequence[float]) -> complex:
    """Characteristic function of the mean-centered step X - (d/p)*ones."""
    t = np.asarray(t, dtype=float)
    mu = s.d / s.p
    return complex(np.exp(-1j * mu * float(t.sum())) * char_fn(s, t))


def walk_tables(s: SupportTable, n: int) -> list[dict[tuple[int, ...], int]]:
    """Exact endpoint tables for 0..n steps (index k holds the k-step law)."""
    if n < 0:
        raise DomainError(f"step count must be >= 0, got {n}")
    zero = (0,) * s.p
    tables: list[dict[tuple[int, ...], int]] = [{zero: 1}]
    for _ in range(n):
        prev = tables[-1]
        nxt: dict[tuple[int, ...], int] = {}
        for m, cnt in prev.items():
            for u, mult in s.atoms:
                key = tuple(a + b for a, b in zip(m, u))
                step = cnt * mult
                if key in nxt:
                    nxt[key] += step
                else:
                    nxt[key] = step
        tables.append(nxt)
    return tables


def walk_distribution(s: SupportTable, n: int, exact: bool = True) -> LatticeDistribution:
    """The n-step endpoint law.

    exact=True (default) gives big-integer counts.  exact=False stores
    natural-log counts as floats, a lossy mode for n far beyond exact
    reach; the result is flagged by its `exact` field.
    """
    if exact:
        return LatticeDistribution(d=s.d, p=s.p, n=n, table=walk_tables(s, n)[-1])
    if n < 0:
        raise DomainError(f"step count must be >= 0, got {n}")
    zero = (0,) * s.p
    log_table: dict[tuple[int, ...], float] = {zero: 0.0}
    log_mults = [(u, math.log(mult)) for u, mult in s.atoms]
    for _ in range(n):
        nxt: dict[tuple[int, ...], float] = {}
        for m, lc in log_table.items():
            for u, lm in log_mults:
                key = tuple(a + b for a, b in zip(m, u))
                v = lc + lm
                if key in nxt:
                    nxt[key] = np.logaddexp(nxt[key], v)
                else:
                    nxt[key] = v
        log_table = nxt
    return LatticeDistribution(d=s.d, p=s.p, n=n, table=log_table, exact=False)


def table_moments(dist: LatticeDistribution) -> MomentData:
    """Exact rational mean/covariance of an exact endpoint table."""
    if not dist.exact:
        raise DomainError("moments of a log-space table are not exact; build with exact=True")
    total = sum(dist.table.values())
    p = dist.p
    mean = [Fraction(0)] * p
    raw2 = [[Fraction(0)] * p for _ in range(p)]
    for m, cnt in dist.table.items():
        for j in range(p):
            if m[j]:
                mean[j] += Fraction(cnt * m[j], total)
                for k in range(p):
                    if m[k]:
                        raw2[j][k] += Fraction(cnt * m[j] * m[k], total)
    cov = tuple(
        tuple(raw2[j][k] - mean[j] * mean[k] for k in range(p)) for j in range(p)
    )
    return MomentData(mean=tuple(mean), cov=cov)


def distribution_to_json(dist: LatticeDistribution) -> dict:
    entries = [
        {"m": list(m), "count": str(c) if dist.exact else float(c)}
        for m, c in sorted(dist.table.items())
    ]
    return {"n": dist.n, "d": dist.d, "p": dist.p, "exact": dist.exact, "entries": entries}


def distribution_from_json(data: dict) -> LatticeDistribution:
    exact = bool(data.get("exact", True))
    table = {
        tuple(int(x) for x in e["m"]): int(e["count"]) if exact else float(e["count"])
        for e in data["entries"]
    }
    return LatticeDistribution(
        d=int(data["d"]), p=int(data["p"]), n=int(data["n"]), table=table, exact=exact
    )
