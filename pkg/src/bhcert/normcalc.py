"""Coefficient l_p norms with rigorous error bounds, and the BH exponent.

Non-integer powers are bracketed with integer arithmetic: for a rational
exponent r/s, ``x**(r/s)`` is enclosed between consecutive dyadic
rationals with ``precision_bits`` fractional bits, using an exact integer
s-th root. Every intermediate bound is rounded outward, so the returned
``BoundedReal`` always contains the true norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import gmpy2

from .errors import MalformedInputError
from .polycore import Polynomial

DEFAULT_PRECISION_BITS = 128

Exponent = Union[int, Fraction, float]


def round_down(q: Fraction) -> float:
    """Largest float not above ``q``."""
    f = float(q)
    if Fraction(f) > q:
        f = math.nextafter(f, -math.inf)
    return f


def round_up(q: Fraction) -> float:
    """Smallest float not below ``q``."""
    f = float(q)
    if Fraction(f) < q:
        f = math.nextafter(f, math.inf)
    return f


@dataclass(frozen=True)
class BHExponent:
    """The Bohnenblust-Hille exponent 2m/(m+1) for degree ``m``."""

    m: int
    value: Fraction

    def __str__(self) -> str:
        return f"{self.value.numerator}/{self.value.denominator}"


def bh_exponent(m: int) -> BHExponent:
    if m < 1:
        raise MalformedInputError(f"degree must be >= 1, got {m}")
    return BHExponent(m, Fraction(2 * m, m + 1))


@dataclass(frozen=True)
class BoundedReal:
    """A real number known to lie in ``[value - abs_err, value + abs_err]``."""

    value: float
    abs_err: float

    def lower(self) -> Fraction:
        return Fraction(self.value) - Fraction(self.abs_err)

    def upper(self) -> Fraction:
        return Fraction(self.value) + Fraction(self.abs_err)

    @classmethod
    def exact(cls, q: Fraction) -> BoundedReal:
        return cls.from_bounds(Fraction(q), Fraction(q))

    @classmethod
    def from_bounds(cls, lo: Fraction, hi: Fraction) -> BoundedReal:
        """Smallest float ball we can cheaply certify around ``[lo, hi]``."""
        if lo > hi:
            raise ValueError("empty enclosure")
        value = float((lo + hi) / 2)
        fv = Fraction(value)
        err = round_up(max(hi - fv, fv - lo, Fraction(0)))
        return cls(value, err)

    def to_dict(self) -> dict:
        return {"value": self.value, "abs_err": self.abs_err}


def _root_floor(y: Fraction, k: int, bits: int) -> tuple[int, bool]:
    """L with L/2^bits <= y^(1/k) < (L+1)/2^bits, and whether equality holds."""
    shifted_num = y.numerator << (bits * k)
    n, rem = divmod(shifted_num, y.denominator)
    root, exact = gmpy2.iroot(gmpy2.mpz(n), k)
    return int(root), bool(exact) and rem == 0


def power_bounds(x: Fraction, e: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """Dyadic enclosure of ``x**e`` for rational ``x >= 0`` and rational ``e > 0``."""
    if x < 0:
        raise MalformedInputError("base must be non-negative")
    if x == 0 or x == 1:
        return x, x
    y = x**e.numerator
    if e.denominator == 1:
        return y, y
    root, exact = _root_floor(y, e.denominator, bits)
    lo = Fraction(root, 1 << bits)
    return lo, (lo if exact else Fraction(root + 1, 1 << bits))


def _as_exponent(exponent: Exponent) -> Fraction | float:
    if isinstance(exponent, float):
        if math.isinf(exponent):
            return math.inf
        raise MalformedInputError("pass finite exponents as int or Fraction")
    e = Fraction(exponent)
    if e < 1:
        raise MalformedInputError(f"exponent {e} < 1 does not define a norm")
    return e


def coeff_l2_norm_sq(p: Polynomial) -> Fraction:
    return sum((c * c for c in p.terms.values()), Fraction(0))


def coeff_sup(p: Polynomial) -> Fraction:
    return max((abs(c) for c in p.terms.values()), default=Fraction(0))


def coeff_l1(p: Polynomial) -> Fraction:
    return sum((abs(c) for c in p.terms.values()), Fraction(0))


def coeff_lp_norm(
    p: Polynomial, exponent: Exponent, precision_bits: int = DEFAULT_PRECISION_BITS
) -> BoundedReal:
    """(sum |a|^e)^(1/e) over the coefficients, enclosed rigorously.

    ``exponent`` may be an int, a Fraction or ``math.inf``.
    """
    e = _as_exponent(exponent)
    if p.is_zero():
        return BoundedReal(0.0, 0.0)
    if e == math.inf:
        return BoundedReal.exact(coeff_sup(p))
    if e == 1:
        return BoundedReal.exact(coeff_l1(p))

    cache: dict[Fraction, tuple[Fraction, Fraction]] = {}
    s_lo = s_hi = Fraction(0)
    for c in p.terms.values():
        a = abs(c)
        if a not in cache:
            cache[a] = power_bounds(a, e, precision_bits)
        lo, hi = cache[a]
        s_lo += lo
        s_hi += hi
    inv = 1 / e
    lo = power_bounds(s_lo, inv, precision_bits)[0]
    hi = power_bounds(s_hi, inv, precision_bits)[1]
    return BoundedReal.from_bounds(lo, hi)


def lp_comparison_check(
    p: Polynomial,
    p_exp: Exponent,
    q_exp: Exponent,
    precision_bits: int = DEFAULT_PRECISION_BITS,
) -> bool:
    """Check |P|_q <= |P|_p <= d^(1/p - 1/q) |P|_q, d the number of nonzero terms.

    Each side is an outward-rounded enclosure; an inequality counts as
    holding unless the enclosures separate in the wrong direction, so cases
    of exact equality (a single term, or all coefficients of equal modulus)
    pass.
    """
    pe, qe = _as_exponent(p_exp), _as_exponent(q_exp)
    if pe > qe:
        raise MalformedInputError(f"need p_exp <= q_exp, got {pe} > {qe}")
    if p.is_zero():
        return True
    norm_p = coeff_lp_norm(p, pe, precision_bits)
    norm_q = coeff_lp_norm(p, qe, precision_bits)
    inv_q = Fraction(0) if qe == math.inf else 1 / qe
    gap = 1 / pe - inv_q
    d = Fraction(len(p))
    factor_hi = power_bounds(d, gap, precision_bits)[1] if gap else Fraction(1)
    lower_ok = norm_q.lower() <= norm_p.upper()
    upper_ok = norm_p.lower() <= factor_hi * norm_q.upper()
    return lower_ok and upper_ok
