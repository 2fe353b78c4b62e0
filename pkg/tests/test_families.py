import math
from fractions import Fraction

import pytest

from bhcert import families
from bhcert.errors import MalformedInputError
from bhcert.families import FamilySpec, parse_spec
from bhcert.normcalc import coeff_l2_norm_sq, coeff_lp_norm, coeff_sup
from bhcert.polycore import (
    embed,
    eval_complex,
    eval_real,
    from_terms,
    is_homogeneous,
    power,
    variable,
    zero,
)


def test_parse_and_str_roundtrip():
    for text in ("R:2", "R:7", "Q:3", "Qpow:2,3", "P4pow:5"):
        assert str(parse_spec(text)) == text
    assert parse_spec("R:4").kind == "R_even"
    assert parse_spec("R:5").kind == "R_odd"


@pytest.mark.parametrize("bad", ["R:1", "R:0", "Q:0", "Qpow:1", "Qpow:0,2", "P4pow:0", "S:2", ""])
def test_parse_rejects(bad):
    with pytest.raises(MalformedInputError):
        parse_spec(bad)


def test_spec_invariants():
    with pytest.raises(MalformedInputError):
        FamilySpec("R_even", (3,))
    with pytest.raises(MalformedInputError):
        FamilySpec("R_odd", (4,))


def test_r_even_examples():
    assert families.r_even(2) == families.r2()
    assert len(families.r_even(4)) == 9
    assert len(families.r_even(6)) == 27


def test_r_odd_examples():
    r3 = families.r_odd(3)
    assert r3.n_vars == 6 and len(r3) == 12
    assert {abs(c) for c in r3.terms.values()} == {1}
    assert families.r_odd(5).n_vars == 10 and len(families.r_odd(5)) == 36
    for m in (3, 5, 7):
        assert coeff_sup(families.r_odd(m)) == 1


def test_r_odd_layout():
    # the linear factors sit on the last two variables
    r3 = families.r_odd(3)
    pt = [Fraction(1), Fraction(1, 2), 0, 0, 0, Fraction(1)]
    # (x6 + x5) R2(x1, x2) with x5 = 0
    assert eval_real(r3, pt) == Fraction(5, 4)


@pytest.mark.parametrize("m", [2, 4, 6, 8])
def test_r_even_counts(m):
    p = families.r_even(m)
    assert len(p) == 3 ** (m // 2)
    assert {abs(c) for c in p.terms.values()} == {1}


@pytest.mark.parametrize("m", [3, 5, 7])
def test_r_odd_counts(m):
    p = families.r_odd(m)
    assert len(p) == 4 * 3 ** ((m - 1) // 2)


def test_q_tower_examples():
    x1, x2 = variable(2, 0), variable(2, 1)
    assert families.q_tower(1) == x1 * x1 - x2 * x2
    q4 = families.q_tower(2)
    assert coeff_sup(q4) == 2
    assert eval_real(q4, [1, 0, 0, 1]) == 0
    assert eval_real(q4, [1, 0, 0, 0]) == 1
    a = embed(families.q_tower(1), 4, 0)
    b = embed(families.q_tower(1), 4, 2)
    assert q4 == a * a - b * b


def test_q_tower_power_examples():
    assert coeff_sup(families.q_tower_power(1, 4)) == 6
    assert coeff_sup(families.q_tower_power(2, 2)) >= Fraction(4, 3) ** 3
    # expansion of the square of Q4 gives 8 as the largest coefficient
    assert coeff_sup(families.q_tower_power(2, 2)) == 8
    assert families.q_tower_power(1, 1) == families.q_tower(1)


def test_p4_power_examples():
    assert families.p4_power(1) == from_terms(2, [((3, 1), 1), ((1, 3), -1)])
    assert dict(families.p4_power(2).terms) == {(6, 2): 1, (4, 4): -2, (2, 6): 1}
    assert coeff_l2_norm_sq(families.p4_power(3)) == 20


@pytest.mark.parametrize("n", range(1, 7))
def test_p4_power_signed_binomials(n):
    p = families.p4_power(n)
    for k in range(n + 1):
        alpha = (n + 2 * (n - k), n + 2 * k)
        assert p.coefficient(alpha) == (-1) ** k * math.comb(n, k)


def test_complexify_is_identity():
    r2 = families.r2()
    assert families.complexify(r2) is r2
    assert eval_complex(families.complexify(r2), [0.5, 0.25]) == pytest.approx(
        float(eval_real(r2, [Fraction(1, 2), Fraction(1, 4)])))
    e = Fraction(4, 3)
    assert coeff_lp_norm(families.complexify(r2), e) == coeff_lp_norm(r2, e)
    assert families.complexify(zero(2)).is_zero()


@pytest.mark.parametrize("spec", families.builtin_specs())
def test_homogeneous_of_advertised_degree(spec):
    p = families.build(spec)
    assert p.n_vars == spec.n_vars
    assert is_homogeneous(p, spec.degree)


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_max_coefficient_floor(k, n):
    if k == 3 and n > 2:
        pytest.skip("expansion too large for a unit test")
    bound = Fraction(2**n, n + 1) ** (2**k - 1)
    assert coeff_sup(families.q_tower_power(k, n)) >= bound


@pytest.mark.parametrize("k", [1, 2])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_binomial_split_over_halves(k, n):
    # Q_{k+1}^n = sum_j C(n,j) (-1)^(n-j) A^(2j) B^(2(n-j)) with A, B on disjoint halves
    half = 2**k
    a = embed(families.q_tower(k), 2 * half, 0)
    b = embed(families.q_tower(k), 2 * half, half)
    total = zero(2 * half)
    for j in range(n + 1):
        total = total + math.comb(n, j) * (-1) ** (n - j) * power(a, 2 * j) * power(b, 2 * (n - j))
    assert total == families.q_tower_power(k + 1, n)


def test_builtin_filters():
    small = families.builtin_specs(max_vars=4, max_degree=8)
    assert all(s.n_vars <= 4 and s.degree <= 8 for s in small)
    assert FamilySpec("R_even", (2,)) in small
