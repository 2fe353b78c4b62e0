"""Lower-bound certificates for real BH constants, plus the closed-form curves.

A certificate records a witness P of degree m and the one-line argument

    D_real(m, n) >= |P|_{2m/(m+1)} / ||P||,

with the numerator enclosed from below by exact coefficient arithmetic and
the denominator enclosed from above by a certified sup norm. The division
is carried out on Fractions and rounded down once at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import ROUND_CEILING, ROUND_FLOOR, ROUND_HALF_EVEN, Context, Decimal
from fractions import Fraction
from typing import Iterable, NamedTuple

import mpmath

from . import __version__, families
from .boxbound import (
    DEFAULT_TOL,
    RangeEnclosure,
    certified_sup_norm,
    structural_sup_norm,
    torus_sup_estimate,
)
from .errors import BHCertError, MalformedInputError
from .families import FamilySpec
from .normcalc import (
    DEFAULT_PRECISION_BITS,
    BHExponent,
    BoundedReal,
    bh_exponent,
    coeff_l2_norm_sq,
    coeff_lp_norm,
    round_down,
)
from .polycore import Polynomial, is_homogeneous

_DPS = 50
SIG_DIGITS = 15
INCONCLUSIVE = "inconclusive - refine"


# --------------------------------------------------------------------------
# Fixed-width decimal output


def _fmt(x: float, rounding: str) -> str:
    if math.isinf(x) or math.isnan(x):
        return repr(x)
    d = Context(prec=SIG_DIGITS, rounding=rounding).plus(Decimal(x))
    return format(d.normalize(), "f") if d else "0"


def fmt_nearest(x: float) -> str:
    """15 significant digits, round-half-even on the exact binary value."""
    return _fmt(x, ROUND_HALF_EVEN)


def fmt_down(x: float) -> str:
    return _fmt(x, ROUND_FLOOR)


def fmt_up(x: float) -> str:
    return _fmt(x, ROUND_CEILING)


class _Raw(float):
    """A float that serializes as a pre-formatted decimal string."""

    def __new__(cls, text: str):
        obj = super().__new__(cls, float(text))
        obj.text = text
        return obj

    def __repr__(self) -> str:
        return self.text


# --------------------------------------------------------------------------
# Certificates


@dataclass
class BoundCertificate:
    m: int
    n_vars: int
    family: FamilySpec | str
    p_exponent: BHExponent
    numerator: BoundedReal
    denominator: RangeEnclosure
    ratio_lower: float
    closed_form_name: str | None = None
    closed_form_value: float | None = None
    floors: list[tuple[str, float, bool]] = field(default_factory=list)
    tol: float | None = None
    precision_bits: int = DEFAULT_PRECISION_BITS

    @property
    def claim(self) -> str:
        return f"D_real({self.m}, {self.n_vars}) >= {fmt_down(self.ratio_lower)}"

    @property
    def floor_cleared(self) -> bool | None:
        if self.closed_form_value is None:
            return None
        return self.ratio_lower >= self.closed_form_value

    def sound(self) -> bool:
        """ratio_lower * hi <= value - abs_err, checked in exact arithmetic."""
        return Fraction(self.ratio_lower) * Fraction(self.denominator.hi) <= self.numerator.lower()

    def to_dict(self) -> dict:
        """JSON-ready mapping with a fixed key order and 15-digit numbers.

        Bound fields are rounded in the safe direction: the ratio and the
        sup-norm lower end downward, the sup-norm upper end upward, and the
        numerator radius is widened to absorb the rounding of its centre.
        """
        num_value = fmt_nearest(self.numerator.value)
        shift = abs(Fraction(Decimal(num_value)) - Fraction(self.numerator.value))
        num_err = fmt_up(float(Fraction(self.numerator.abs_err) + shift) * (1 + 2**-50))
        closed = None
        if self.closed_form_name is not None:
            closed = {"name": self.closed_form_name,
                      "value": _Raw(fmt_nearest(self.closed_form_value))}
        return {
            "claim": self.claim,
            "m": self.m,
            "n_vars": self.n_vars,
            "family": str(self.family),
            "p_exponent": str(self.p_exponent),
            "numerator": {"value": _Raw(num_value), "abs_err": _Raw(num_err)},
            "denominator": {
                "lo": _Raw(fmt_down(self.denominator.lo)),
                "hi": _Raw(fmt_up(self.denominator.hi)),
                "method": self.denominator.method,
            },
            "ratio_lower": _Raw(fmt_down(self.ratio_lower)),
            "closed_form": closed,
            "floors": [{"name": n, "value": _Raw(fmt_nearest(v)), "cleared": c}
                       for n, v, c in self.floors],
            "toolchain": {
                "tol": self.tol,
                "precision_bits": self.precision_bits,
                "version": __version__,
            },
        }


def certify_lower_bound(
    p: Polynomial,
    m: int,
    sup: RangeEnclosure,
    precision_bits: int = DEFAULT_PRECISION_BITS,
    family: FamilySpec | str = "custom",
) -> BoundCertificate:
    """Certificate D_real(m, n) >= |P|_{2m/(m+1)} / sup.hi for the witness ``p``."""
    if p.is_zero():
        raise MalformedInputError("the zero polynomial certifies nothing")
    if not is_homogeneous(p, m):
        raise MalformedInputError(f"witness is not {m}-homogeneous")
    if not math.isfinite(sup.hi) or sup.hi <= 0:
        raise MalformedInputError(f"sup-norm upper bound must be finite and positive, got {sup.hi}")
    exponent = bh_exponent(m)
    num = coeff_lp_norm(p, exponent.value, precision_bits)
    ratio = round_down(max(num.lower(), Fraction(0)) / Fraction(sup.hi))
    return BoundCertificate(
        m=m,
        n_vars=p.n_vars,
        family=family,
        p_exponent=exponent,
        numerator=num,
        denominator=sup,
        ratio_lower=ratio,
        tol=sup.tol,
        precision_bits=precision_bits,
    )


# --------------------------------------------------------------------------
# Closed forms


def thm2_base() -> float:
    """2 * 3^(1/4) / sqrt(5)."""
    with mpmath.workdps(_DPS):
        return float(2 * mpmath.root(3, 4) / mpmath.sqrt(5))


def thm2_closed_form(m: int) -> float:
    """(2 * 3^(1/4) / sqrt(5))^m, the R-family lower bound."""
    if m < 2:
        raise MalformedInputError("the R-family bound needs m >= 2")
    with mpmath.workdps(_DPS):
        return float((2 * mpmath.root(3, 4) / mpmath.sqrt(5)) ** m)


def thm3_lower(k: int, n: int) -> Fraction:
    """(2^n / (n+1))^(2^k - 1), exact; the degree is n 2^k on 2^k variables."""
    if k < 1 or n < 1:
        raise MalformedInputError("need k >= 1 and n >= 1")
    return Fraction(2**n, n + 1) ** (2**k - 1)


def thm3_limit(k: int) -> float:
    """2^(1 - 2^-k), the limit of the m-th roots along the Q-tower powers."""
    if k < 1:
        raise MalformedInputError("need k >= 1")
    return 2.0 ** (1 - 2.0**-k)


def thm5_lower(n: int) -> tuple[float, float]:
    """(sqrt(C(2n,n)) / (2 sqrt3 / 9)^n, (4/(m pi))^(1/4) 27^(m/8)) with m = 4n."""
    if n < 1:
        raise MalformedInputError("need n >= 1")
    with mpmath.workdps(_DPS):
        norm = 2 * mpmath.sqrt(3) / 9
        exact = mpmath.sqrt(math.comb(2 * n, n)) / norm**n
        m = 4 * n
        asym = mpmath.root(4 / (m * mpmath.pi), 4) * mpmath.power(27, mpmath.mpf(m) / 8)
        return float(exact), float(asym)


def prop4_constant(m: int, n: int) -> float:
    """C(m+n-1, n-1)^(1/(2m))."""
    if m < 1:
        raise MalformedInputError("need m >= 1")
    if n < 2:
        raise MalformedInputError("need n >= 2")
    with mpmath.workdps(_DPS):
        return float(mpmath.root(math.comb(m + n - 1, n - 1), 2 * m))


# --------------------------------------------------------------------------
# Complex-side checks


def check_parseval(p: Polynomial, grid: int = 64, polish: int = 50) -> bool:
    """Whether |P|_2 <= the torus sup estimate holds outright.

    The torus estimate is a lower bound of the polydisk sup, so a True here
    is genuine evidence; False only means the estimate is too coarse.
    """
    if grid < 8:
        raise MalformedInputError("grid must be >= 8")
    est = Fraction(torus_sup_estimate(p, grid, polish))
    return coeff_l2_norm_sq(p) <= est * est


class VisserCheck(NamedTuple):
    ratio: float
    holds: bool

    @property
    def status(self) -> str:
        return "pass" if self.holds else INCONCLUSIVE


def check_visser(
    p: Polynomial,
    m: int,
    grid: int = 64,
    polish: int = 50,
    sup: RangeEnclosure | None = None,
    rel_tol: float = 1e-6,
) -> VisserCheck:
    """Compare sup |P_C| (torus estimate) with 2^(m-1) times the real sup.

    The denominator is the certified lower end of the real sup norm. A
    failing comparison cannot refute the complexification bound, since both
    sides are lower estimates; it is reported as inconclusive.
    """
    if p.is_zero() or not is_homogeneous(p, m):
        raise MalformedInputError(f"input is not a nonzero {m}-homogeneous polynomial")
    if sup is None:
        sup = certified_sup_norm(p)
    if sup.lo <= 0:
        return VisserCheck(math.inf, False)
    ratio = torus_sup_estimate(p, grid, polish) / sup.lo
    return VisserCheck(ratio, ratio <= 2.0 ** (m - 1) * (1 + rel_tol))


# --------------------------------------------------------------------------
# Family certificates and sweeps


def family_floors(spec: FamilySpec) -> list[tuple[str, float]]:
    """Closed-form floors a certificate for ``spec`` is expected to clear.

    The first entry is the primary floor. For odd R the proof chain ends at
    exponent m - 1, so that is primary; the exponent-m value is listed too.
    """
    kind, params = spec.kind, spec.params
    if kind == "R_even":
        return [("thm2", thm2_closed_form(params[0]))]
    if kind == "R_odd":
        m = params[0]
        return [("thm2_chain_m_minus_1", thm2_closed_form(m - 1)),
                ("thm2_statement_m", thm2_closed_form(m))]
    if kind == "Q_tower":
        return [("thm3", float(thm3_lower(params[0], 1)))]
    if kind == "Q_tower_power":
        return [("thm3", float(thm3_lower(*params)))]
    return [("thm5_exact", thm5_lower(params[0])[0])]


def certify_family(
    spec: FamilySpec | str,
    tol: float = DEFAULT_TOL,
    precision_bits: int = DEFAULT_PRECISION_BITS,
) -> BoundCertificate:
    """Build, enclose and certify one family member, with floors attached."""
    if isinstance(spec, str):
        spec = families.parse_spec(spec)
    p = families.build(spec)
    sup = structural_sup_norm(spec, tol)
    cert = certify_lower_bound(p, spec.degree, sup, precision_bits, family=spec)
    cert.tol = tol
    floors = family_floors(spec)
    cert.closed_form_name, cert.closed_form_value = floors[0]
    cert.floors = [(name, v, cert.ratio_lower >= v) for name, v in floors]
    return cert


@dataclass
class SweepResult:
    certificates: list[BoundCertificate]
    errors: list[tuple[str, str]]

    def __iter__(self):
        return iter(self.certificates)

    def __len__(self) -> int:
        return len(self.certificates)

    @property
    def ok(self) -> bool:
        return not self.errors


def sweep(
    specs: Iterable[FamilySpec | str],
    tol: float = DEFAULT_TOL,
    precision_bits: int = DEFAULT_PRECISION_BITS,
) -> SweepResult:
    """Certificates for each spec, ordered by (m, n_vars); failures are collected."""
    parsed = []
    errors = []
    for s in specs:
        try:
            parsed.append(families.parse_spec(s) if isinstance(s, str) else s)
        except BHCertError as exc:
            errors.append((str(s), str(exc)))
    parsed.sort(key=lambda s: (s.degree, s.n_vars, str(s)))
    certs = []
    for spec in parsed:
        try:
            certs.append(certify_family(spec, tol, precision_bits))
        except BHCertError as exc:
            errors.append((str(spec), str(exc)))
    return SweepResult(certs, errors)
