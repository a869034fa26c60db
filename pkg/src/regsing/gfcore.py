"""Exact linear algebra over prime fields and over the integers.

Matrices are plain sequences of equal-length rows of Python ints, so
nothing ever overflows.  Elimination mod p runs on int64 numpy arrays
when products of two residues fit in a signed 64-bit word (p < 2**31);
larger primes fall back to pure-Python arithmetic, which keeps the same
pivot order.  Integer rank and determinant use fraction-free (Bareiss)
elimination: every intermediate entry is an exact minor of the input,
and every division is exact.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import InvalidModulusError, ShapeError

try:
    from gmpy2 import mpz
    from gmpy2 import divexact as _divexact
except ImportError:  # pragma: no cover - optional speedup only
    mpz = int

    def _divexact(a: int, b: int) -> int:
        # exact quotient, so floor division is the true quotient
        return a // b

# Products of two residues must fit in int64 for the vectorized path.
NUMPY_PRIME_LIMIT = 1 << 31
# Deterministic Miller-Rabin with the witness set below is exact for all
# n < 3.3e24, far above this cap.
PRIME_LIMIT = 1 << 63

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

Matrix = Sequence[Sequence[int]]


def is_prime(p: int) -> bool:
    """Deterministic Miller-Rabin primality test, exact below 2**63."""
    if p < 2:
        return False
    for q in _MR_WITNESSES:
        if p % q == 0:
            return p == q
    d = p - 1
    r = (d & -d).bit_length() - 1
    d >>= r
    for a in _MR_WITNESSES:
        x = pow(a, d, p)
        if x == 1 or x == p - 1:
            continue
        for _ in range(r - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


def require_prime(p) -> int:
    """Validate a modulus, returning it as int; reject composites."""
    if not isinstance(p, (int, np.integer)):
        raise InvalidModulusError(f"modulus must be an integer, got {type(p).__name__}")
    p = int(p)
    if p < 2 or p >= PRIME_LIMIT:
        raise InvalidModulusError(f"modulus must be a prime in [2, 2**63), got {p}")
    if not is_prime(p):
        raise InvalidModulusError(f"modulus {p} is not prime")
    return p


def _checked_rows(matrix: Matrix) -> list[list[int]]:
    rows = [[int(x) for x in row] for row in matrix]
    if rows:
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ShapeError("ragged matrix: rows have differing lengths")
    return rows


def rank_mod_p(matrix: Matrix, p) -> int:
    """Rank of the matrix over F_p.

    Entries are reduced mod p on entry.  Pivoting picks the first
    nonzero entry in column order, so the pivot sequence is a pure
    function of the input.
    """
    p = require_prime(p)
    rows = _checked_rows(matrix)
    if not rows or not rows[0]:
        return 0
    if p < NUMPY_PRIME_LIMIT:
        return _rank_mod_numpy(rows, p)
    return _rank_mod_python(rows, p)


def _rank_mod_numpy(rows: list[list[int]], p: int) -> int:
    try:
        a = np.array(rows, dtype=np.int64)
    except OverflowError:
        # entries beyond int64: reduce exactly first
        a = (np.array(rows, dtype=object) % p).astype(np.int64)
    return _rank_mod_numpy_arr(a % p, p)


def _rank_mod_numpy_arr(a: np.ndarray, p: int) -> int:
    """Elimination core; `a` must be int64 with entries in [0, p). Mutates a."""
    nr, nc = a.shape
    r = 0
    for c in range(nc):
        if r == nr:
            break
        hits = np.nonzero(a[r:, c])[0]
        if hits.size == 0:
            continue
        i = r + int(hits[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), -1, p)
        a[r, c:] = a[r, c:] * inv % p
        col = a[r + 1 :, c]
        nz = np.nonzero(col)[0]
        if nz.size:
            a[r + 1 :, c:][nz] = (a[r + 1 :, c:][nz] - np.outer(col[nz], a[r, c:])) % p
        r += 1
    return r


def _rank_mod_python(rows: list[list[int]], p: int) -> int:
    a = [[x % p for x in row] for row in rows]
    nr, nc = len(a), len(a[0])
    r = 0
    for c in range(nc):
        if r == nr:
            break
        pivot = next((i for i in range(r, nr) if a[i][c]), None)
        if pivot is None:
            continue
        if pivot != r:
            a[r], a[pivot] = a[pivot], a[r]
        inv = pow(a[r][c], -1, p)
        ar = a[r] = [x * inv % p for x in a[r]]
        for i in range(r + 1, nr):
            f = a[i][c]
            if f:
                ai = a[i]
                a[i] = [(x - f * y) % p for x, y in zip(ai, ar)]
        r += 1
    return r


def kernel_count(matrix: Matrix, p) -> int:
    """Number of nonzero null vectors of a square matrix over F_p.

    Equals p**(n - rank) - 1; zero exactly when the matrix is
    nonsingular mod p.
    """
    rows = _checked_rows(matrix)
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ShapeError(f"kernel counting needs a square matrix, got {n}x{len(rows[0]) if rows else 0}")
    p = require_prime(p)
    return p ** (n - rank_mod_p(rows, p)) - 1


def _bareiss(rows: list[list[int]]) -> tuple[int, int, int]:
    """Fraction-free echelon reduction.

    Returns (rank, last_pivot, sign).  After the k-th pivot every entry
    below is a (k+1)x(k+1) minor of the input built from the pivot
    rows/columns, which is what makes every division exact.  Rows below
    the pivot are always rescaled, even when their pivot-column entry is
    zero; skipping that would break the minor invariant.
    """
    nr = len(rows)
    nc = len(rows[0]) if nr else 0
    a = [[mpz(x) for x in row] for row in rows]
    prev = mpz(1)
    sign = 1
    r = 0
    for c in range(nc):
        if r == nr:
            break
        pivot = next((i for i in range(r, nr) if a[i][c]), None)
        if pivot is None:
            continue
        if pivot != r:
            a[r], a[pivot] = a[pivot], a[r]
            sign = -sign
        pc = a[r][c]
        ar = a[r]
        for i in range(r + 1, nr):
            ai = a[i]
            f = ai[c]
            for j in range(c + 1, nc):
                ai[j] = _divexact(pc * ai[j] - f * ar[j], prev)
            ai[c] = mpz(0)
        prev = pc
        r += 1
    return r, int(prev), sign


def rank_integer(matrix: Matrix) -> int:
    """Rank over the rationals via Bareiss elimination (exact)."""
    rows = _checked_rows(matrix)
    if not rows or not rows[0]:
        return 0
    return _bareiss(rows)[0]


def det_integer(matrix: Matrix) -> int:
    """Exact determinant of a square integer matrix (Bareiss)."""
    rows = _checked_rows(matrix)
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ShapeError("determinant needs a square matrix")
    if n == 0:
        return 1
    rank, last_pivot, sign = _bareiss(rows)
    if rank < n:
        return 0
    return sign * last_pivot


def matrix_to_json(matrix: Matrix) -> list[list[str]]:
    """Serialize as arrays of decimal strings (entries may exceed 64 bits)."""
    return [[str(int(x)) for x in row] for row in matrix]


def matrix_from_json(data) -> list[list[int]]:
    """Parse a matrix serialized by matrix_to_json (strings or numbers)."""
    return _checked_rows([[int(x) for x in row] for row in data])
