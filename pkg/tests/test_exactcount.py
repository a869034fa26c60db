"""Closed-form class counts and master sums for both models."""

import itertools
import math
from fractions import Fraction

import pytest

from regsing import bruteoracle, exactcount
from regsing.errors import CostGuardError, DomainError

# Frozen master sums (directed d=3, p=2), certified against the closed
# binomial form of the walk counts before freezing.
MASTER_DIRECTED_D3_P2 = {
    4: Fraction(54, 77),
    8: Fraction(38934, 46189),
    16: Fraction(15694438598118, 13249079564501),
}

# Frozen master sums (undirected d=3, p=2); the n=4 value was also
# verified against full pairing enumeration.
MASTER_UNDIRECTED_D3_P2 = {
    4: Fraction(72, 55),
    8: Fraction(13316400, 7436429),
}


def test_multinomial_examples_and_row_sum():
    assert exactcount.multinomial(4, (2, 2)) == 6
    assert exactcount.multinomial(3, (0, 1, 2)) == 3
    assert exactcount.multinomial(0, (0, 0)) == 1
    # all class multiplicities over F_p^n add up to p^n
    n, p = 5, 3
    total = sum(
        exactcount.multinomial(n, sig)
        for sig in exactcount.class_signatures(n, p, skip_zero_class=False)
    )
    assert total == p**n


def test_validate_signature_errors():
    with pytest.raises(DomainError):
        exactcount.validate_signature((1, 2), 3)
    with pytest.raises(DomainError):
        exactcount.validate_signature((-1, 3), 2)
    assert exactcount.validate_signature((0, 2), 2) == (0, 2)


def test_model_sizes():
    assert exactcount.model_size_directed(2, 3) == math.factorial(6)
    assert exactcount.model_size_undirected(2, 3) == 15
    assert exactcount.model_size_undirected(4, 3) == 10395


def test_class_signatures_count():
    n, p = 6, 3
    sigs = list(exactcount.class_signatures(n, p))
    assert len(sigs) == math.comb(n + p - 1, p - 1) - 1
    assert all(sum(s) == n and s[0] < n for s in sigs)
    with_zero = list(exactcount.class_signatures(n, p, skip_zero_class=False))
    assert len(with_zero) == len(sigs) + 1


def test_hand_anchor_counts():
    assert exactcount.count_graphs_directed((0, 1, 1), 3, 3) == 72
    assert exactcount.count_graphs_undirected((0, 1, 1), 3, 3) == 6
    # no 3-regular digraph on 2 vertices annihilates a nonzero F_2 vector
    assert exactcount.count_graphs_directed((1, 1), 3, 2) == 0
    assert exactcount.count_graphs_directed((0, 2), 3, 2) == 0


def test_master_anchor_values():
    assert exactcount.master_sum_directed(3, 3, 2) == Fraction(27, 28)
    assert exactcount.master_sum_directed(2, 3, 2) == 0
    assert exactcount.master_sum_directed(2, 3, 3) == Fraction(13, 5)
    for n, value in MASTER_DIRECTED_D3_P2.items():
        assert exactcount.master_sum_directed(n, 3, 2) == value
    for n, value in MASTER_UNDIRECTED_D3_P2.items():
        assert exactcount.master_sum_undirected(n, 3, 2) == value


def test_singularity_bound():
    assert exactcount.singularity_bound_from_master(Fraction(27, 28), 2) == Fraction(27, 28)
    assert exactcount.singularity_bound_from_master(Fraction(13, 5), 3) == Fraction(13, 10)


def brute_pairing_matrices(sig, d, p):
    """Scan every symmetric matrix with bounded entries for the conditions."""
    rows = [d * x for x in sig]
    bound = max(rows, default=0)
    upper_keys = [(i, j) for i in range(p) for j in range(i, p)]
    out = set()
    for vals in itertools.product(range(bound + 1), repeat=len(upper_keys)):
        m = [[0] * p for _ in range(p)]
        for (i, j), v in zip(upper_keys, vals):
            m[i][j] = v
            m[j][i] = v
        if any(m[i][i] % 2 for i in range(p)):
            continue
        if any(sum(m[i]) != rows[i] for i in range(p)):
            continue
        if any(sum(j * m[i][j] for j in range(p)) % p for i in range(p)):
            continue
        out.add(tuple(tuple(r) for r in m))
    return out


@pytest.mark.parametrize(
    "sig,d,p",
    [((1, 1), 3, 2), ((2, 0), 3, 2), ((0, 2), 3, 2), ((1, 1, 1), 3, 3), ((0, 1, 1), 3, 3)],
)
def test_pairing_matrix_enumeration_matches_scan(sig, d, p):
    got = set(exactcount.enumerate_pairing_matrices(sig, d, p))
    assert got == brute_pairing_matrices(sig, d, p)


def test_pairing_matrix_weight_and_census():
    # weights times fiber multinomials reproduce the pairing census on
    # two vertices of degree 3
    census = bruteoracle.adjacency_census_undirected(2, 3)
    loopy = ((2, 1), (1, 2))
    crossing = ((0, 3), (3, 0))
    assert census[loopy] == 9
    assert census[crossing] == 6
    assert exactcount.pairing_matrix_weight([[2, 1], [1, 2]]) == 1
    assert exactcount.pairing_matrix_weight([[0, 3], [3, 0]]) == 6
    assert exactcount.pairing_matrix_weight([[4, 0], [0, 2]]) == 3


def test_pairing_matrix_cost_guard():
    with pytest.raises(CostGuardError):
        exactcount.enumerate_pairing_matrices((4, 4), 3, 2, cap=2)


def test_master_denominators_divide_model_sizes():
    for n in (2, 3, 4):
        m = exactcount.master_sum_directed(n, 3, 2)
        assert math.factorial(3 * n) % m.denominator == 0
    for n in (2, 4):
        m = exactcount.master_sum_undirected(n, 3, 2)
        assert exactcount.model_size_undirected(n, 3) % m.denominator == 0


def test_class_term_directed_assembles_master():
    n, d, p = 3, 3, 2
    total = sum(
        exactcount.class_term_directed(sig, d, p) for sig in exactcount.class_signatures(n, p)
    )
    assert total == exactcount.master_sum_directed(n, d, p)
