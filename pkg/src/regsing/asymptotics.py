"""Floating-point approximations for the kernel-count analysis.

Everything exact lives in exactcount; this module holds the analytic
side: characteristic-function scans over the torus, local-limit
approximants for per-class master terms, the closed Gaussian value of
the near-uniform regime, large-deviation rate functions with Legendre
minimization, and the spectral check of the quadratic-form operator
behind the symmetric-matrix Gaussian closure.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np
from scipy import integrate
from scipy.special import logsumexp
from scipy.stats import chi2

from .errors import CostGuardError, DomainError, ShapeError
from .exactcount import class_signatures, class_term_directed, validate_signature
from .walkdist import SupportTable, build_support, walk_tables

TWO_PI = 2.0 * math.pi

# |phi| = 1 - 1e-9 marks a grid point as effectively sitting on one of
# the invariance lines; scans count how many such points escape the
# excluded tubes (a sound scan reports zero).
NEAR_ONE_EPS = 1e-9

SCAN_POINT_CAP = 100_000_000
SCAN_CHUNK = 1 << 16


def helmert_basis(p: int) -> np.ndarray:
    """Orthonormal basis of the hyperplane orthogonal to the all-ones
    vector, as the columns of a (p, p-1) matrix."""
    if p < 2:
        raise DomainError(f"need p >= 2, got {p}")
    o = np.zeros((p, p - 1))
    for k in range(1, p):
        o[:k, k - 1] = 1.0
        o[k, k - 1] = -float(k)
        o[:, k - 1] /= math.sqrt(k * (k + 1))
    return o


@dataclass(frozen=True)
class CfDomain:
    """Union of tubes around the lines where |phi| reaches 1.

    A point t belongs to tube j when t - 2*pi*j*(0, 1/p, ..., (p-1)/p)
    lies within squared distance delta of the all-ones line, modulo
    2*pi shifts.  The component along the all-ones direction is free:
    shifting t by a multiple of 2*pi*(1, ..., 1) moves it through a full
    period without changing the orthogonal part.
    """

    p: int
    delta: float

    def __post_init__(self):
        if self.p < 2:
            raise DomainError(f"need p >= 2, got {self.p}")
        # the two-value shift window in _tube_mask needs the tube radius
        # sqrt(delta) below pi
        if not 0.0 < self.delta < math.pi**2:
            raise DomainError(f"delta must lie in (0, pi^2), got {self.delta}")

    def line_point(self, j: int) -> np.ndarray:
        """Base point of line j: 2*pi*j*(0, 1/p, ..., (p-1)/p)."""
        return TWO_PI * j * np.arange(self.p) / self.p

    def contains(self, t: Sequence[float], j: int | None = None) -> bool:
        """Whether t lies in tube j, or in any tube when j is None."""
        pts = np.asarray(t, dtype=float).reshape(1, -1)
        if pts.shape[1] != self.p:
            raise ShapeError(f"point has {pts.shape[1]} coordinates, need {self.p}")
        o = helmert_basis(self.p)
        js = range(self.p) if j is None else (j % self.p,)
        return bool(_tube_mask(pts, self.p, self.delta, o, js)[0])


def _tube_mask(
    points: np.ndarray,
    p: int,
    delta: float,
    o: np.ndarray,
    js: Sequence[int] | range | None = None,
) -> np.ndarray:
    """Boolean mask of rows of `points` lying in some excluded tube.

    After reducing into [0, 2*pi)^p, a point within sqrt(delta) < pi of
    the all-ones line differs from a constant vector by less than pi per
    coordinate, so the integer shifts realizing the nearest
    representative span at most two consecutive values per coordinate;
    a common shift along all-ones is free, leaving the {0, 1}^p window.
    """
    if js is None:
        js = range(p)
    mask = np.zeros(len(points), dtype=bool)
    base = TWO_PI * np.arange(p) / p
    shifts = np.array(list(itertools.product((0.0, 1.0), repeat=p)))
    for j in js:
        w = np.mod(points - j * base, TWO_PI)
        for k in shifts:
            x = (w + TWO_PI * k) @ o
            mask |= np.einsum("ij,ij->i", x, x) <= delta
    return mask


def _abs_cf(points: np.ndarray, support: SupportTable) -> np.ndarray:
    """|phi(t)| for each row t of points.

    Centering the step multiplies phi by a unit phase, so the magnitude
    of the centered and raw functions coincide.
    """
    atoms = np.array([u for u, _ in support.atoms], dtype=float)
    mults = np.array([m for _, m in support.atoms], dtype=float)
    weights = mults / float(support.total)
    return np.abs(np.exp(1j * points @ atoms.T) @ weights)


@dataclass(frozen=True)
class CfScanReport:
    d: int
    p: int
    delta: float
    grid_step: float
    grid_size: int
    n_points: int
    n_outside: int
    max_abs_outside: float
    argmax: tuple[float, ...] | None
    margin: float
    near_one_outside: int


def cf_scan(
    d: int,
    p: int,
    delta: float,
    grid_step: float,
    *,
    point_cap: int = SCAN_POINT_CAP,
) -> CfScanReport:
    """Scan |phi| on a uniform torus grid outside the excluded tubes.

    |phi| is constant along the all-ones direction, so every orbit has a
    representative on the slice t_0 = 0 and the scan covers the slice
    grid of size k^(p-1), with k = 2*pi/grid_step.  The step must divide
    2*pi evenly.  The cost guard applies to the nominal p-dimensional
    grid the slice stands in for.
    """
    support = build_support(d, p)
    domain = CfDomain(p, delta)
    if grid_step <= 0:
        raise DomainError(f"grid step must be positive, got {grid_step}")
    k = round(TWO_PI / grid_step)
    if k < 1 or abs(TWO_PI / k - grid_step) > 1e-9 * grid_step:
        raise DomainError(f"grid step {grid_step} does not divide 2*pi evenly")
    if k**p > point_cap:
        raise CostGuardError(
            f"torus grid {k}^{p} exceeds the {point_cap}-point cost guard"
        )
    o = helmert_basis(p)
    axis = TWO_PI * np.arange(k) / k
    n_points = k ** (p - 1)
    n_outside = 0
    near_one_outside = 0
    max_abs = 0.0
    argmax: tuple[float, ...] | None = None
    for start in range(0, n_points, SCAN_CHUNK):
        flat = np.arange(start, min(start + SCAN_CHUNK, n_points))
        coords = np.unravel_index(flat, (k,) * (p - 1))
        pts = np.zeros((len(flat), p))
        for axis_idx, c in enumerate(coords):
            pts[:, axis_idx + 1] = axis[c]
        outside = ~_tube_mask(pts, p, delta, o)
        if not outside.any():
            continue
        vals = _abs_cf(pts[outside], support)
        n_outside += int(outside.sum())
        near_one_outside += int((vals > 1.0 - NEAR_ONE_EPS).sum())
        top = int(np.argmax(vals))
        if vals[top] > max_abs:
            max_abs = float(vals[top])
            argmax = tuple(float(v) for v in pts[outside][top])
    return CfScanReport(
        d=d,
        p=p,
        delta=delta,
        grid_step=TWO_PI / k,
        grid_size=k,
        n_points=n_points,
        n_outside=n_outside,
        max_abs_outside=max_abs,
        argmax=argmax,
        margin=1.0 - max_abs,
        near_one_outside=near_one_outside,
    )


class LcltValue(NamedTuple):
    value: float
    applicable: bool


def lclt_directed(sig: Sequence[int], d: int, p: int) -> LcltValue:
    """Gaussian local-limit approximation of one class's master term.

    Approximates multinomial(n; sig) * count / (nd)! by
    p^(3/2) * (p/(2*pi*n))^((p-1)/2) * exp(-(p*n/2) * q) with q the
    squared deviation of sig/n from uniform.  Classes violating the
    weighted congruence have exact value 0; the flag marks the
    approximant as inapplicable there.
    """
    sig = validate_signature(sig, p)
    n = sum(sig)
    if n < 1:
        raise DomainError("signature must have positive total")
    if d < 1:
        raise DomainError(f"need d >= 1, got {d}")
    applicable = (d * sum(j * c for j, c in enumerate(sig))) % p == 0
    o = helmert_basis(p)
    dev = np.array(sig, dtype=float) / n - 1.0 / p
    q = float(np.dot(o.T @ dev, o.T @ dev))
    value = p**1.5 * (p / (TWO_PI * n)) ** ((p - 1) / 2) * math.exp(-p * n * q / 2)
    return LcltValue(value=value, applicable=applicable)


def near_uniform_classes(n: int, p: int, b: float) -> list[tuple[int, ...]]:
    """Nonzero classes whose histogram deviation satisfies
    sum_j (sig_j/n - 1/p)^2 <= b * ln(n) / n."""
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    if b < 0:
        raise DomainError(f"need b >= 0, got {b}")
    radius = b * math.log(n) / n
    out = []
    for sig in class_signatures(n, p):
        dev = sum((c / n - 1.0 / p) ** 2 for c in sig)
        if dev <= radius + 1e-15:
            out.append(sig)
    return out


def restricted_master_directed(n: int, d: int, p: int, b: float) -> Fraction:
    """Exact master sum restricted to the near-uniform window."""
    tables = walk_tables(build_support(d, p), n)
    total = Fraction(0)
    for sig in near_uniform_classes(n, p, b):
        total += class_term_directed(sig, d, p, tables=tables)
    return total


def lclt_total_directed(n: int, d: int, p: int, b: float) -> float:
    """Local-limit approximation of the near-uniform master total:
    the sum of per-class approximants over applicable classes."""
    total = 0.0
    for sig in near_uniform_classes(n, p, b):
        val = lclt_directed(sig, d, p)
        if val.applicable:
            total += val.value
    return total


def gaussian_closure_directed(n: int, d: int, p: int, b: float) -> float:
    """Closed Gaussian value of the near-uniform class total.

    The class sum is a Riemann sum of the local-limit density over a
    lattice of covolume sqrt(p)/n^(p-1), thinned by the congruence to
    one residue in p; the closed integral collapses to a chi-square
    tail with p - 1 degrees of freedom and threshold p * b * ln(n).
    """
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    if d < 1:
        raise DomainError(f"need d >= 1, got {d}")
    if p < 2:
        raise DomainError(f"need p >= 2, got {p}")
    if b < 0:
        raise DomainError(f"need b >= 0, got {b}")
    return float(chi2.cdf(p * b * math.log(n), df=p - 1))


def _check_simplex(frak_n: Sequence[float], p: int) -> np.ndarray:
    nu = np.asarray(frak_n, dtype=float)
    if nu.shape != (p,):
        raise ShapeError(f"need {p} frequencies, got shape {nu.shape}")
    if (nu < 0).any():
        raise DomainError("frequencies must be nonnegative")
    if abs(float(nu.sum()) - 1.0) > 1e-9:
        raise DomainError(f"frequencies must sum to 1, got {float(nu.sum())!r}")
    return nu


def rate_directed_explicit(frak_n: Sequence[float], d: int, p: int) -> float:
    """Upper bound for the directed rate from the explicit tilt choice.

    log of the sum over the step multiset of
    prod_k frak_n[k]^(u_k * (d-1)/d), with the 0^0 = 1 convention.
    Returns -inf when every product vanishes.
    """
    nu = _check_simplex(frak_n, p)
    support = build_support(d, p)
    alpha = (d - 1) / d
    total = 0.0
    for atom, mult in support.atoms:
        term = float(mult)
        for u_k, n_k in zip(atom, nu):
            if u_k == 0:
                continue
            if n_k == 0.0:
                term = 0.0
                break
            term *= n_k ** (alpha * u_k)
        total += term
    if total == 0.0:
        return float("-inf")
    return math.log(total)


@dataclass(frozen=True)
class RateEvaluation:
    value: float
    minimizer: tuple[float, ...]
    converged: bool
    boundary: bool


def rate_directed_opt(
    frak_n: Sequence[float],
    d: int,
    p: int,
    *,
    max_iter: int = 200,
    grad_tol: float = 1e-12,
) -> RateEvaluation:
    """Directed rate by Legendre minimization of the tilted objective.

    Minimizes log E[exp(<t, X>)] - d <t, frak_n> by damped Newton.  The
    objective is invariant along the all-ones direction (the step sums
    to d and the frequencies to 1), so the iteration runs on the slice
    t_0 = 0 where the tilted covariance is nonsingular.  The reported
    value is the assembled rate, capped by the explicit-tilt upper
    bound.  Classes with empty symbols push the infimum to infinity;
    those carry the boundary flag and typically report the explicit
    bound.
    """
    nu = _check_simplex(frak_n, p)
    support = build_support(d, p)
    atoms = np.array([u for u, _ in support.atoms], dtype=float)
    log_w = np.array([math.log(m) for _, m in support.atoms]) - (d - 1) * math.log(p)
    boundary = bool((nu == 0.0).any())
    explicit = rate_directed_explicit(nu, d, p)

    def objective(z: np.ndarray) -> float:
        t = np.concatenate(([0.0], z))
        return float(logsumexp(atoms @ t + log_w) - d * t @ nu)

    z = np.zeros(p - 1)
    f = objective(z)
    converged = False
    for _ in range(max_iter):
        t = np.concatenate(([0.0], z))
        scores = atoms @ t + log_w
        q = np.exp(scores - logsumexp(scores))
        mean = q @ atoms
        grad = (mean - d * nu)[1:]
        if np.linalg.norm(grad) <= grad_tol:
            converged = True
            break
        centered = atoms - mean
        cov = centered.T @ (q[:, None] * centered)
        hess = cov[1:, 1:] + 1e-12 * np.eye(p - 1)
        step = -np.linalg.solve(hess, grad)
        # Armijo backtracking keeps the Newton step inside the region
        # where the quadratic model is trusted
        scale = 1.0
        while scale > 1e-12:
            cand = z + scale * step
            f_cand = objective(cand)
            if f_cand <= f + 1e-4 * scale * float(grad @ step):
                z, f = cand, f_cand
                break
            scale /= 2.0
        else:
            break
    entropy = sum(float(n_k) * math.log(n_k) for n_k in nu if n_k > 0.0)
    assembled = (d - 1) * math.log(p) + (d - 1) * entropy + f
    value = min(assembled, explicit)
    minimizer = (0.0, *(float(v) for v in z))
    return RateEvaluation(
        value=value, minimizer=minimizer, converged=converged, boundary=boundary
    )


def rate_undirected_explicit(frak_m: Sequence[Sequence[float]], d: int, p: int) -> float:
    """Upper bound for the undirected rate from the explicit row tilts.

    (d-2)/2 * sum_ij m_ij ln(n_i n_j / m_ij) plus the row-wise directed
    bounds weighted by the marginals n_i = sum_j m_ij, with 0 ln 0 = 0.
    """
    m = np.asarray(frak_m, dtype=float)
    if m.shape != (p, p):
        raise ShapeError(f"need a {p} x {p} matrix, got shape {m.shape}")
    if (m < 0).any():
        raise DomainError("entries must be nonnegative")
    if np.abs(m - m.T).max() > 1e-12:
        raise DomainError("matrix must be symmetric")
    if abs(float(m.sum()) - 1.0) > 1e-9:
        raise DomainError(f"entries must sum to 1, got {float(m.sum())!r}")
    marg = m.sum(axis=1)
    term1 = 0.0
    for i in range(p):
        for j in range(p):
            if m[i, j] > 0.0:
                term1 += m[i, j] * math.log(marg[i] * marg[j] / m[i, j])
    term1 *= (d - 2) / 2
    term2 = 0.0
    for i in range(p):
        if marg[i] > 0.0:
            row = m[i] / marg[i]
            term2 += marg[i] * rate_directed_explicit(row, d, p)
    return term1 + term2


def require_sym_zero(a: Sequence[Sequence[float]], tol: float = 1e-12) -> np.ndarray:
    """Validate a symmetric matrix with zero total entry sum."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"need a square matrix, got shape {m.shape}")
    if np.abs(m - m.T).max() > tol:
        raise DomainError("matrix must be symmetric")
    if abs(float(m.sum())) > tol:
        raise DomainError("total entry sum must be zero")
    return m


def apply_quadratic_operator(
    a: Sequence[Sequence[float]], n: int, d: int, p: int
) -> np.ndarray:
    """-d n p^2 A / 4 + (d-1) n p (A J + J A) / 4 with J all-ones."""
    m = require_sym_zero(a)
    if m.shape[0] != p:
        raise ShapeError(f"need a {p} x {p} matrix, got shape {m.shape}")
    ones = np.ones((p, p))
    return -d * n * p**2 * m / 4 + (d - 1) * n * p * (m @ ones + ones @ m) / 4


@dataclass(frozen=True)
class OperatorReport:
    p: int
    n: int
    d: int
    laplacian_eigenvalue: float
    laplacian_dim: int
    laplacian_max_residual: float
    bordered_eigenvalue: float
    bordered_dim: int
    bordered_max_residual: float
    families_orthogonal: bool
    space_dim: int
    dims_consistent: bool
    closed_integral: float
    quadrature_integral: float | None
    quadrature_gap: float | None


def closed_gaussian_integral(p: int, n: int, d: int) -> float:
    """Product over the two eigenvalue families of (pi/|eigenvalue|)^(1/2)
    per dimension."""
    return (4 * math.pi / (d * n * p**2)) ** ((p**2 - p) / 4) * (
        4 * math.pi / (n * p**2)
    ) ** ((p - 1) / 2)


def operator_L_check(p: int, n: int, d: int) -> OperatorReport:
    """Verify the eigen-decomposition of the quadratic-form operator.

    Family one: symmetric matrices with zero row sums, spanned by edge
    Laplacians, eigenvalue -d*n*p^2/4, dimension p(p-1)/2.  Family two:
    a 1^t + 1 a^t with a summing to zero, eigenvalue -n*p^2/4, dimension
    p - 1.  Together they fill the zero-total-sum symmetric space.  At
    p = 2 the closed Gaussian integral over that space is compared with
    direct quadrature.
    """
    if p < 2:
        raise DomainError(f"need p >= 2, got {p}")
    if n < 1 or d < 1:
        raise DomainError(f"need n, d >= 1, got n={n}, d={d}")
    lam1 = -d * n * p**2 / 4
    lam2 = -n * p**2 / 4
    family1 = []
    for i in range(p):
        for j in range(i + 1, p):
            e = np.zeros(p)
            e[i], e[j] = 1.0, -1.0
            family1.append(np.outer(e, e))
    o = helmert_basis(p)
    family2 = [np.outer(a, np.ones(p)) + np.outer(np.ones(p), a) for a in o.T]
    res1 = max(
        float(np.abs(apply_quadratic_operator(a, n, d, p) - lam1 * a).max())
        for a in family1
    )
    res2 = max(
        float(np.abs(apply_quadratic_operator(a, n, d, p) - lam2 * a).max())
        for a in family2
    )
    cross = max(
        abs(float(np.tensordot(a, b))) for a in family1 for b in family2
    )
    stack1 = np.array([a.ravel() for a in family1])
    stack2 = np.array([a.ravel() for a in family2])
    dim1 = int(np.linalg.matrix_rank(stack1))
    dim2 = int(np.linalg.matrix_rank(stack2))
    joint = int(np.linalg.matrix_rank(np.vstack([stack1, stack2])))
    space_dim = p * (p + 1) // 2 - 1
    dims_consistent = (
        dim1 == p * (p - 1) // 2 and dim2 == p - 1 and joint == dim1 + dim2 == space_dim
    )
    closed = closed_gaussian_integral(p, n, d)
    quad_val: float | None = None
    quad_gap: float | None = None
    if p == 2:
        # orthonormal coordinates along the two eigendirections turn the
        # exponent into lam1 x^2 + lam2 y^2
        quad_val, _ = integrate.dblquad(
            lambda y, x: math.exp(lam1 * x * x + lam2 * y * y),
            -np.inf,
            np.inf,
            -np.inf,
            np.inf,
        )
        quad_gap = abs(quad_val - closed)
    return OperatorReport(
        p=p,
        n=n,
        d=d,
        laplacian_eigenvalue=lam1,
        laplacian_dim=dim1,
        laplacian_max_residual=res1,
        bordered_eigenvalue=lam2,
        bordered_dim=dim2,
        bordered_max_residual=res2,
        families_orthogonal=cross < 1e-10,
        space_dim=space_dim,
        dims_consistent=dims_consistent,
        closed_integral=closed,
        quadrature_integral=quad_val,
        quadrature_gap=quad_gap,
    )
