"""Ground-truth enumeration of the entire model at tiny sizes.

The directed model is every permutation of the nd points; the
undirected model is every perfect pairing.  These streams are the
oracles that certify the per-class counting identities: for each vector
v over F_p, tally the outcomes whose adjacency kills v, then compare
with the closed-form counts, class by class and vector by vector.

A second, independent directed oracle enumerates adjacency matrices
with all row and column sums d directly and weights each by the number
of permutations inducing it, (d!)^(2n) / prod_{k,l} A_kl!.  That weight
formula is derived, not quoted, so it is only trusted after being
validated against the permutation census (see tests); it never replaces
the permutation stream as the primary oracle.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from . import exactcount
from .confmodel import Graph, GraphParams
from .errors import BudgetExceededError, InvalidParamsError
from .walkdist import compositions, phi


@dataclass(frozen=True)
class OracleBudget:
    max_points_directed: int = 9  # (nd)! <= 362880
    max_points_undirected: int = 12  # (nd-1)!! <= 10395


DEFAULT_BUDGET = OracleBudget()


def _check_budget(n: int, d: int, mode: str, budget: OracleBudget) -> None:
    points = n * d
    cap = budget.max_points_directed if mode == "directed" else budget.max_points_undirected
    if points > cap:
        raise BudgetExceededError(
            f"{mode} enumeration needs nd <= {cap}, got nd = {points}; "
            f"pass a larger OracleBudget to force"
        )


def enumerate_directed(n: int, d: int, budget: OracleBudget = DEFAULT_BUDGET) -> Iterator[Graph]:
    """Stream all (nd)! directed outcomes, lexicographic by permutation."""
    _check_budget(n, d, "directed", budget)
    params = GraphParams(n=n, d=d, mode="directed")
    nd = n * d
    fiber = [t // d for t in range(nd)]
    for perm in itertools.permutations(range(nd)):
        a = [[0] * n for _ in range(n)]
        for t in range(nd):
            a[fiber[t]][fiber[perm[t]]] += 1
        yield Graph(params=params, adjacency=tuple(map(tuple, a)), witness=perm)


def all_pairings(items: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """All perfect matchings of the items, flattened with pairs consecutive.

    Pairs the first remaining item with each other remaining item, so
    each matching appears exactly once.
    """
    if not items:
        yield ()
        return
    first, rest = items[0], list(items[1:])
    for i, partner in enumerate(rest):
        for tail in all_pairings(rest[:i] + rest[i + 1 :]):
            yield (first, partner) + tail


def enumerate_undirected(n: int, d: int, budget: OracleBudget = DEFAULT_BUDGET) -> Iterator[Graph]:
    """Stream all (nd-1)!! pairings of the nd points."""
    if (n * d) % 2:
        raise InvalidParamsError(f"pairings need an even point count, got nd = {n * d}")
    _check_budget(n, d, "undirected", budget)
    params = GraphParams(n=n, d=d, mode="undirected")
    for order in all_pairings(range(n * d)):
        a = [[0] * n for _ in range(n)]
        for t in range(0, len(order), 2):
            u, v = order[t] // d, order[t + 1] // d
            a[u][v] += 1
            a[v][u] += 1
        yield Graph(params=params, adjacency=tuple(map(tuple, a)), witness=order)


def adjacency_census_directed(
    n: int, d: int, budget: OracleBudget = DEFAULT_BUDGET
) -> dict[tuple[tuple[int, ...], ...], int]:
    """Tally of adjacency matrices over all permutations of the points."""
    _check_budget(n, d, "directed", budget)
    nd = n * d
    fiber = [t // d for t in range(nd)]
    census: dict[bytes, int] = {}
    flat = bytearray(n * n)
    for perm in itertools.permutations(range(nd)):
        for i in range(n * n):
            flat[i] = 0
        for t in range(nd):
            flat[fiber[t] * n + fiber[perm[t]]] += 1
        key = bytes(flat)
        census[key] = census.get(key, 0) + 1
    return {_unflatten(k, n): c for k, c in census.items()}


def adjacency_census_undirected(
    n: int, d: int, budget: OracleBudget = DEFAULT_BUDGET
) -> dict[tuple[tuple[int, ...], ...], int]:
    """Tally of adjacency matrices over all pairings of the points."""
    if (n * d) % 2:
        raise InvalidParamsError(f"pairings need an even point count, got nd = {n * d}")
    _check_budget(n, d, "undirected", budget)
    census: dict[bytes, int] = {}
    flat = bytearray(n * n)
    for order in all_pairings(range(n * d)):
        for i in range(n * n):
            flat[i] = 0
        for t in range(0, len(order), 2):
            u, v = order[t] // d, order[t + 1] // d
            flat[u * n + v] += 1
            flat[v * n + u] += 1
        key = bytes(flat)
        census[key] = census.get(key, 0) + 1
    return {_unflatten(k, n): c for k, c in census.items()}


def _unflatten(flat: bytes, n: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(flat[i * n : (i + 1) * n]) for i in range(n))


def matrix_census_directed(n: int, d: int) -> dict[tuple[tuple[int, ...], ...], int]:
    """Second directed oracle: enumerate matrices with row/column sums d,
    weighted by (d!)^(2n) / prod A_kl! permutations each."""
    row_choices = list(compositions(d, n))
    rows_out: list[list[tuple[int, ...]]] = []

    def rec(row_idx: int, col_load: tuple[int, ...], current: list[tuple[int, ...]]):
        if row_idx == n:
            if all(c == d for c in col_load):
                rows_out.append(list(current))
            return
        remaining_rows = n - row_idx - 1
        for comp in row_choices:
            new_load = tuple(a + b for a, b in zip(col_load, comp))
            # each column still needs at most d per remaining row
            if any(c > d or d - c > remaining_rows * d for c in new_load):
                continue
            current.append(comp)
            rec(row_idx + 1, new_load, current)
            current.pop()

    rec(0, (0,) * n, [])
    base = math.factorial(d) ** (2 * n)
    census = {}
    for mat in rows_out:
        w = base
        for row in mat:
            for x in row:
                w //= math.factorial(x)
        census[tuple(mat)] = w
    return census


@dataclass
class ClassRow:
    sig: tuple[int, ...]
    class_size: int
    expected: int
    observed: int
    ok: bool


@dataclass
class CertificationReport:
    n: int
    d: int
    p: int
    mode: str
    classes: list[ClassRow] = field(default_factory=list)
    mismatches: list[dict] = field(default_factory=list)
    class_consistent: bool = True
    master_exact: Fraction = Fraction(0)
    master_brute: Fraction = Fraction(0)
    passed: bool = False


def _vector_tallies(census: dict, n: int, p: int) -> list[int]:
    """For every v in F_p^n (lex order), the number of outcomes killing v."""
    vectors = np.array(list(itertools.product(range(p), repeat=n)), dtype=np.int64).T
    tallies = np.zeros(p**n, dtype=np.int64)
    for mat, weight in census.items():
        a = np.array(mat, dtype=np.int64)
        dead = ~np.any((a @ vectors) % p, axis=0)
        tallies[dead] += weight
    return [int(x) for x in tallies]


def certify_identities(
    n: int, d: int, p: int, mode: str, budget: OracleBudget = DEFAULT_BUDGET
) -> CertificationReport:
    """Tally |{G : A(G)v = 0}| for every v by enumeration and compare with
    the closed-form class counts; also checks that the tally is constant
    within each class and that the brute master sum matches."""
    report = CertificationReport(n=n, d=d, p=p, mode=mode)
    if mode == "directed":
        census = adjacency_census_directed(n, d, budget)
        count_fn = exactcount.count_graphs_directed
        model_size = exactcount.model_size_directed(n, d)
        report.master_exact = exactcount.master_sum_directed(n, d, p)
    elif mode == "undirected":
        census = adjacency_census_undirected(n, d, budget)
        count_fn = exactcount.count_graphs_undirected
        model_size = exactcount.model_size_undirected(n, d)
        report.master_exact = exactcount.master_sum_undirected(n, d, p)
    else:
        raise InvalidParamsError(f"mode must be directed|undirected, got {mode!r}")

    tallies = _vector_tallies(census, n, p)
    by_class: dict[tuple[int, ...], list[tuple[tuple[int, ...], int]]] = {}
    for idx, v in enumerate(itertools.product(range(p), repeat=n)):
        by_class.setdefault(phi(v, p), []).append((v, tallies[idx]))

    nonzero_total = 0
    for sig in sorted(by_class):
        members = by_class[sig]
        expected = count_fn(sig, d, p)
        values = {t for _, t in members}
        if len(values) > 1:
            report.class_consistent = False
        ok = values == {expected}
        report.classes.append(
            ClassRow(
                sig=sig,
                class_size=len(members),
                expected=expected,
                observed=members[0][1],
                ok=ok,
            )
        )
        for v, t in members:
            if t != expected:
                report.mismatches.append({"v": v, "expected": expected, "got": t})
        if sig[0] != n:
            nonzero_total += sum(t for _, t in members)

    report.master_brute = Fraction(nonzero_total, model_size)
    report.passed = (
        report.class_consistent
        and not report.mismatches
        and report.master_brute == report.master_exact
    )
    return report
