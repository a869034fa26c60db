"""Monte Carlo estimation of adjacency-matrix singularity probabilities.

Trials are seeded individually, so tallies are identical for any worker
count, and integer-mode singularity decisions are exact: a full-rank
reduction modulo one prime certifies nonsingularity, while deficiency
escalates through a duplicate row or column certificate, a second
prime, and finally a fraction-free integer determinant.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .confmodel import GraphParams, directed_adjacency, undirected_adjacency
from .errors import InvalidParamsError
from .exactcount import master_sum_directed, master_sum_undirected
from .gfcore import (
    NUMPY_PRIME_LIMIT,
    _rank_mod_numpy_arr,
    det_integer,
    is_prime,
    rank_mod_p,
    require_prime,
)

# 95% two-sided normal quantile
Z95 = 1.959963984540054


@dataclass(frozen=True)
class McConfig:
    n: int
    d: int
    mode: str = "directed"
    p: int | None = None
    trials: int = 1000
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        GraphParams(n=self.n, d=self.d, mode=self.mode)
        if self.p is not None:
            require_prime(self.p)
        if self.trials < 1:
            raise InvalidParamsError(f"trials must be >= 1, got {self.trials}")
        if self.workers < 1:
            raise InvalidParamsError(f"workers must be >= 1, got {self.workers}")


@dataclass(frozen=True)
class McReport:
    n: int
    d: int
    mode: str
    p: int | None
    trials: int
    seed: int
    singular_count: int
    estimate: float
    wilson_ci_95: tuple[float, float]
    kernel_total: int
    kernel_sq_total: int
    kernel_positive: int
    mean_kernel_count: float | None
    duplicate_rows: int
    duplicate_row_rate: float
    escalations: int
    wall_time_s: float


def wilson_ci(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval; well behaved when the estimate sits near 0."""
    if trials < 1:
        raise InvalidParamsError(f"trials must be >= 1, got {trials}")
    if not 0 <= successes <= trials:
        raise InvalidParamsError(f"successes {successes} outside [0, {trials}]")
    ph = successes / trials
    denom = 1.0 + z * z / trials
    center = (ph + z * z / (2 * trials)) / denom
    half = z * math.sqrt(ph * (1 - ph) / trials + z * z / (4 * trials * trials)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


def _mc_primes(seed: int) -> tuple[int, int]:
    """Two random 31-bit primes for the integer-mode fast path.

    Primes below 2^31 keep the rank reduction inside int64 products; a
    prime that misses a nonzero determinant only costs an escalation,
    never a wrong answer.
    """
    rng = np.random.default_rng(np.random.SeedSequence(entropy=(seed, 1)))
    primes: list[int] = []
    while len(primes) < 2:
        cand = int(rng.integers(1 << 30, 1 << 31)) | 1
        if is_prime(cand) and cand not in primes:
            primes.append(cand)
    return primes[0], primes[1]


def _has_duplicate_rows(a: np.ndarray) -> bool:
    return np.unique(a, axis=0).shape[0] < a.shape[0]


def _rank_fp(a: np.ndarray, n: int, p: int) -> int:
    if p < NUMPY_PRIME_LIMIT:
        return _rank_mod_numpy_arr(np.mod(a, p), p)
    return rank_mod_p(a.tolist(), p)


def _run_block(
    n: int,
    d: int,
    mode: str,
    p: int | None,
    seed: int,
    lo: int,
    hi: int,
    primes: tuple[int, int] | None,
) -> dict[str, int]:
    tally = {
        "singular": 0,
        "kernel_total": 0,
        "kernel_sq_total": 0,
        "kernel_positive": 0,
        "duplicate_rows": 0,
        "escalations": 0,
    }
    for i in range(lo, hi):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=(seed, 0, i)))
        order = rng.permutation(n * d)
        if mode == "directed":
            a = directed_adjacency(n, d, order)
        else:
            a = undirected_adjacency(n, d, order)
        dup_rows = _has_duplicate_rows(a)
        if dup_rows:
            tally["duplicate_rows"] += 1
        if p is not None:
            rank = _rank_fp(a, n, p)
            kernel = p ** (n - rank) - 1
            tally["kernel_total"] += kernel
            tally["kernel_sq_total"] += kernel * kernel
            if kernel:
                tally["kernel_positive"] += 1
            if rank < n:
                tally["singular"] += 1
            continue
        p1, p2 = primes
        if _rank_fp(a, n, p1) == n:
            continue
        # a duplicate row or column forces a zero determinant
        if dup_rows or _has_duplicate_rows(a.T):
            tally["singular"] += 1
            continue
        if _rank_fp(a, n, p2) == n:
            continue
        tally["escalations"] += 1
        if det_integer(a.tolist()) == 0:
            tally["singular"] += 1
    return tally


def run_mc(cfg: McConfig) -> McReport:
    """Run the Monte Carlo experiment described by cfg.

    Trial i draws its randomness from the entropy triple (seed, 0, i),
    so results do not depend on the worker partition.
    """
    start = time.perf_counter()
    primes = _mc_primes(cfg.seed) if cfg.p is None else None
    blocks: list[tuple[int, int]] = []
    chunk = max(1, -(-cfg.trials // max(4 * cfg.workers, 1)))
    for lo in range(0, cfg.trials, chunk):
        blocks.append((lo, min(lo + chunk, cfg.trials)))
    if cfg.workers == 1:
        tallies = [
            _run_block(cfg.n, cfg.d, cfg.mode, cfg.p, cfg.seed, lo, hi, primes)
            for lo, hi in blocks
        ]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            futures = [
                pool.submit(
                    _run_block, cfg.n, cfg.d, cfg.mode, cfg.p, cfg.seed, lo, hi, primes
                )
                for lo, hi in blocks
            ]
            tallies = [f.result() for f in futures]
    total = {k: sum(t[k] for t in tallies) for k in tallies[0]}
    mean_kernel = total["kernel_total"] / cfg.trials if cfg.p is not None else None
    return McReport(
        n=cfg.n,
        d=cfg.d,
        mode=cfg.mode,
        p=cfg.p,
        trials=cfg.trials,
        seed=cfg.seed,
        singular_count=total["singular"],
        estimate=total["singular"] / cfg.trials,
        wilson_ci_95=wilson_ci(total["singular"], cfg.trials),
        kernel_total=total["kernel_total"],
        kernel_sq_total=total["kernel_sq_total"],
        kernel_positive=total["kernel_positive"],
        mean_kernel_count=mean_kernel,
        duplicate_rows=total["duplicate_rows"],
        duplicate_row_rate=total["duplicate_rows"] / cfg.trials,
        escalations=total["escalations"],
        wall_time_s=time.perf_counter() - start,
    )


@dataclass(frozen=True)
class McComparison:
    n: int
    d: int
    p: int
    mode: str
    trials: int
    seed: int
    empirical_mean: float
    exact: Fraction
    std_error: float
    z_score: float
    report: McReport


def mc_vs_exact(
    n: int, d: int, p: int, mode: str, trials: int, seed: int, workers: int = 1
) -> McComparison:
    """Empirical mean kernel count against the exact master sum.

    The z-score is the standardized gap; a degenerate sample (zero
    variance) scores 0 when the means agree exactly and +-inf otherwise.
    """
    cfg = McConfig(n=n, d=d, mode=mode, p=p, trials=trials, seed=seed, workers=workers)
    report = run_mc(cfg)
    if mode == "directed":
        exact = master_sum_directed(n, d, p)
    else:
        exact = master_sum_undirected(n, d, p)
    mean = report.kernel_total / trials
    if trials > 1:
        var = (report.kernel_sq_total - trials * mean * mean) / (trials - 1)
        var = max(var, 0.0)
    else:
        var = 0.0
    se = math.sqrt(var / trials)
    gap = mean - float(exact)
    if se == 0.0:
        z = 0.0 if Fraction(report.kernel_total, trials) == exact else math.copysign(
            math.inf, gap
        )
    else:
        z = gap / se
    return McComparison(
        n=n,
        d=d,
        p=p,
        mode=mode,
        trials=trials,
        seed=seed,
        empirical_mean=mean,
        exact=exact,
        std_error=se,
        z_score=z,
        report=report,
    )


@dataclass(frozen=True)
class ScalingReport:
    d: int
    mode: str
    trials: int
    seed: int
    rows: tuple[McReport, ...]
    slope: float | None
    slope_stderr: float | None
    window: tuple[float, float]
    in_window: bool | None


def scaling_probe(
    d: int,
    n_list: tuple[int, ...] | list[int],
    trials: int,
    seed: int,
    *,
    mode: str = "directed",
    workers: int = 1,
    slack: float = 0.5,
) -> ScalingReport:
    """Integer-mode singularity frequency against n, with a log-log fit.

    The fitted slope is report-only; the window pairs the polynomial
    lower-bound exponent -(d-2), widened by `slack`, with the upper
    bound exponent for the decay rate.
    """
    if len(n_list) < 1:
        raise InvalidParamsError("n_list must not be empty")
    rows = []
    for idx, n in enumerate(n_list):
        sub_seed = int(np.random.SeedSequence(entropy=(seed, 2, idx)).generate_state(1)[0])
        cfg = McConfig(
            n=n, d=d, mode=mode, p=None, trials=trials, seed=sub_seed, workers=workers
        )
        rows.append(run_mc(cfg))
    frak_d = min(0.25, (d - 2) / (2 * d))
    window = (-(d - 2) - slack, -frak_d)
    pts = [
        (math.log(r.n), math.log(r.estimate)) for r in rows if r.singular_count > 0
    ]
    slope = stderr = None
    in_window = None
    if len(pts) >= 2:
        xs = np.array([x for x, _ in pts])
        ys = np.array([y for _, y in pts])
        slope_v, intercept = np.polyfit(xs, ys, 1)
        slope = float(slope_v)
        resid = ys - (slope * xs + intercept)
        denom = float(((xs - xs.mean()) ** 2).sum())
        if len(pts) > 2 and denom > 0:
            stderr = math.sqrt(float((resid**2).sum()) / (len(pts) - 2) / denom)
        in_window = window[0] <= slope <= window[1]
    return ScalingReport(
        d=d,
        mode=mode,
        trials=trials,
        seed=seed,
        rows=tuple(rows),
        slope=slope,
        slope_stderr=stderr,
        window=window,
        in_window=in_window,
    )
