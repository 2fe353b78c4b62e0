import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bhcert import families
from bhcert.errors import MalformedInputError
from bhcert.normcalc import (
    BoundedReal,
    bh_exponent,
    coeff_l1,
    coeff_l2_norm_sq,
    coeff_lp_norm,
    coeff_sup,
    lp_comparison_check,
    power_bounds,
)
from bhcert.polycore import from_terms, power, zero

from conftest import polynomials

mpmath.mp.dps = 50
R2 = families.r2()
Q2 = families.q_tower(1)


def _encloses(b: BoundedReal, exact) -> bool:
    return b.lower() <= Fraction(str(mpmath.nstr(exact, 40))) + Fraction(1, 10**35) and \
        Fraction(str(mpmath.nstr(exact, 40))) - Fraction(1, 10**35) <= b.upper()


def test_bh_exponent_values():
    assert bh_exponent(2).value == Fraction(4, 3)
    assert bh_exponent(1).value == 1
    for n in range(1, 6):
        assert bh_exponent(4 * n).value == Fraction(8 * n, 4 * n + 1)
    assert str(bh_exponent(4)) == "8/5"
    with pytest.raises(MalformedInputError):
        bh_exponent(0)


def test_bh_exponent_is_increasing_below_two():
    vals = [bh_exponent(m).value for m in range(2, 40)]
    assert all(1 < v < 2 for v in vals)
    assert vals == sorted(vals)


def test_r2_bh_norm():
    b = coeff_lp_norm(R2, Fraction(4, 3))
    oracle = mpmath.power(3, mpmath.mpf(3) / 4)
    assert abs(b.value - float(oracle)) < 1e-12
    assert b.abs_err <= 1e-12
    assert _encloses(b, oracle)


def test_q2_squared_norm_at_eight_fifths():
    p = power(Q2, 2)
    b = coeff_lp_norm(p, Fraction(8, 5))
    oracle = (2 + mpmath.power(2, mpmath.mpf(8) / 5)) ** (mpmath.mpf(5) / 8)
    assert _encloses(b, oracle)
    assert b.value == pytest.approx(2.745094602382651, abs=1e-12)


def test_l2_consistency():
    p = families.build("Qpow:2,2")
    b = coeff_lp_norm(p, 2)
    sq = coeff_l2_norm_sq(p)
    assert b.lower() ** 2 <= sq <= b.upper() ** 2


def test_exact_norm_values():
    assert coeff_l2_norm_sq(families.p4_power(3)) == 20
    for n in range(1, 8):
        assert coeff_l2_norm_sq(families.p4_power(n)) == math.comb(2 * n, n)
    assert coeff_sup(power(Q2, 4)) == 6
    assert coeff_l1(zero(3)) == 0


def test_zero_norm_and_bad_exponent():
    assert coeff_lp_norm(zero(2), Fraction(3, 2)).value == 0
    assert coeff_lp_norm(zero(2), math.inf).value == 0
    with pytest.raises(MalformedInputError):
        coeff_lp_norm(R2, Fraction(1, 2))


def test_power_bounds_exact_cases():
    assert power_bounds(Fraction(4), Fraction(1, 2), 64) == (2, 2)
    lo, hi = power_bounds(Fraction(3), Fraction(3, 4), 64)
    assert lo < hi and hi - lo == Fraction(1, 2**64)


def test_lp_comparison_examples():
    assert lp_comparison_check(R2, Fraction(4, 3), 2)
    mono = from_terms(2, [((2, 1), Fraction(-7, 3))])
    assert lp_comparison_check(mono, 1, math.inf)
    assert lp_comparison_check(mono, Fraction(4, 3), 2)
    assert lp_comparison_check(power(Q2, 2), Fraction(8, 5), 2)
    with pytest.raises(MalformedInputError):
        lp_comparison_check(R2, 2, Fraction(4, 3))


EXPONENTS = [Fraction(1), Fraction(4, 3), Fraction(8, 5), Fraction(2), math.inf]


@given(polynomials(max_terms=6))
def test_lp_monotone_in_exponent(p):
    norms = [coeff_lp_norm(p, e) for e in EXPONENTS]
    for a, b in zip(norms, norms[1:]):
        assert b.lower() <= a.upper()


@given(polynomials(max_terms=5), st.fractions(min_value=-4, max_value=4, max_denominator=5))
def test_lp_homogeneous_in_scalar(p, c):
    e = Fraction(6, 4)
    scaled = coeff_lp_norm(c * p, e)
    base = coeff_lp_norm(p, e)
    a = abs(c)
    assert scaled.lower() <= a * base.upper() and a * base.lower() <= scaled.upper()


@given(polynomials(max_terms=6), st.sampled_from(EXPONENTS))
def test_coeff_sup_below_every_lp(p, e):
    assert coeff_sup(p) <= coeff_lp_norm(p, e).upper()


@given(polynomials(max_terms=6))
def test_l2_sq_is_exact_sum(p):
    total = Fraction(0)
    for c in p.terms.values():
        total += c * c
    assert coeff_l2_norm_sq(p) == total


@given(polynomials(max_terms=6), st.sampled_from(EXPONENTS[:-1]))
def test_comparison_check_always_holds(p, e):
    assert lp_comparison_check(p, e, 2 if e <= 2 else math.inf)
