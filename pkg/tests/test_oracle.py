import math

import pytest

from bhcert import families
from bhcert.boxbound import structural_sup_norm
from bhcert.errors import BudgetExceededError, MalformedInputError
from bhcert.oracle import (
    binom_identity_check,
    binomial_max_check,
    grid_sup_lower,
    naive_expand,
    odd_product_check,
    same_coefficients,
    stirling_gap,
)
from bhcert.polycore import constant


def test_grid_examples():
    assert grid_sup_lower(families.r2(), 101) >= 1.2499
    # the best node is y = 0.58: 0.58 * (1 - 0.58^2) = 0.384888
    assert grid_sup_lower(families.p4(), 201) == pytest.approx(0.384888, abs=1e-12)
    assert round(grid_sup_lower(families.p4(), 201), 5) == 0.38489
    for n in (2, 5, 11):
        assert grid_sup_lower(constant(2, 7), n) == 7


def test_grid_monotone_on_nested_grids():
    p = families.r_odd(3)
    a = grid_sup_lower(p, 5)
    b = grid_sup_lower(p, 9)
    c = grid_sup_lower(p, 17)
    assert a <= b <= c


def test_grid_guards():
    with pytest.raises(MalformedInputError):
        grid_sup_lower(families.r2(), 1)
    with pytest.raises(BudgetExceededError):
        grid_sup_lower(families.build("R:8"), 11)


def test_naive_expand_examples():
    assert same_coefficients(families.r_even(4), naive_expand("R:4"))
    assert same_coefficients(families.q_tower_power(1, 3), naive_expand("Qpow:1,3"))
    assert naive_expand("P4pow:2") == {(6, 2): 1, (4, 4): -2, (2, 6): 1}


@pytest.mark.parametrize("spec", families.builtin_specs())
def test_naive_expand_matches_constructors(spec):
    assert same_coefficients(families.build(spec), naive_expand(spec))


def test_binomial_identity():
    assert sum(math.comb(2, k) ** 2 for k in range(3)) == 6
    assert sum(math.comb(5, k) ** 2 for k in range(6)) == 252
    assert binom_identity_check(50)
    with pytest.raises(MalformedInputError):
        binom_identity_check(0)


def test_integer_inequalities():
    assert odd_product_check(50)
    assert binomial_max_check(50)


def test_stirling_gap():
    gaps = [stirling_gap(n) for n in (1, 2, 4, 8, 16)]
    assert all(g > 0 for g in gaps)
    assert gaps == sorted(gaps, reverse=True)
    # 16 -> 0.003898 in a 50-digit run; 0.01 leaves room
    assert gaps[-1] < 0.01


@pytest.mark.parametrize("spec", ["R:2", "R:4", "Q:1", "Q:2", "P4pow:1", "P4pow:3", "Qpow:1,4"])
def test_grid_below_structural_hi(spec):
    p = families.build(spec)
    assert grid_sup_lower(p, 101 if p.n_vars <= 2 else 31) <= structural_sup_norm(
        families.parse_spec(spec)).hi
