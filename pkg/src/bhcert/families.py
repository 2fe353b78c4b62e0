"""Extremal polynomial families for real BH lower bounds.

Every constructor goes through polycore operations; coefficient tables are
never hard-coded. Canonical spec strings: ``R:m``, ``Q:k``, ``Qpow:k,n``,
``P4pow:n``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

from .errors import MalformedInputError
from .polycore import (
    Polynomial,
    disjoint_product,
    embed,
    from_terms,
    power,
    variable,
)

KINDS = ("R_even", "R_odd", "Q_tower", "Q_tower_power", "P4_power")


@dataclass(frozen=True, order=True)
class FamilySpec:
    """Names one member of a supported family.

    ``params`` is ``(m,)`` for the R families, ``(k,)`` for Q towers,
    ``(k, n)`` for Q-tower powers and ``(n,)`` for powers of P4.
    """

    kind: str
    params: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in KINDS:
            raise MalformedInputError(f"unknown family kind {self.kind!r}")
        p = self.params
        if self.kind == "R_even" and not (len(p) == 1 and p[0] >= 2 and p[0] % 2 == 0):
            raise MalformedInputError("R_even needs an even m >= 2")
        if self.kind == "R_odd" and not (len(p) == 1 and p[0] >= 3 and p[0] % 2 == 1):
            raise MalformedInputError("R_odd needs an odd m >= 3")
        if self.kind == "Q_tower" and not (len(p) == 1 and p[0] >= 1):
            raise MalformedInputError("Q_tower needs k >= 1")
        if self.kind == "Q_tower_power" and not (len(p) == 2 and p[0] >= 1 and p[1] >= 1):
            raise MalformedInputError("Q_tower_power needs k >= 1 and n >= 1")
        if self.kind == "P4_power" and not (len(p) == 1 and p[0] >= 1):
            raise MalformedInputError("P4_power needs n >= 1")

    @property
    def degree(self) -> int:
        if self.kind in ("R_even", "R_odd"):
            return self.params[0]
        if self.kind == "Q_tower":
            return 2 ** self.params[0]
        if self.kind == "Q_tower_power":
            k, n = self.params
            return n * 2**k
        return 4 * self.params[0]

    @property
    def n_vars(self) -> int:
        if self.kind == "R_even":
            return self.params[0]
        if self.kind == "R_odd":
            return 2 * self.params[0]
        if self.kind in ("Q_tower", "Q_tower_power"):
            return 2 ** self.params[0]
        return 2

    def __str__(self) -> str:
        if self.kind in ("R_even", "R_odd"):
            return f"R:{self.params[0]}"
        if self.kind == "Q_tower":
            return f"Q:{self.params[0]}"
        if self.kind == "Q_tower_power":
            return f"Qpow:{self.params[0]},{self.params[1]}"
        return f"P4pow:{self.params[0]}"


_SPEC_RE = re.compile(r"^\s*(R|Q|Qpow|P4pow)\s*:\s*(-?\d+)\s*(?:,\s*(-?\d+)\s*)?$")


def parse_spec(text: str) -> FamilySpec:
    """Parse ``R:m``, ``Q:k``, ``Qpow:k,n`` or ``P4pow:n``."""
    match = _SPEC_RE.match(text)
    if not match:
        raise MalformedInputError(
            f"cannot parse family spec {text!r}; expected R:m, Q:k, Qpow:k,n or P4pow:n"
        )
    name, a, b = match.group(1), int(match.group(2)), match.group(3)
    if (name == "Qpow") != (b is not None):
        raise MalformedInputError(f"wrong number of parameters in {text!r}")
    if name == "R":
        if a >= 2 and a % 2 == 0:
            return FamilySpec("R_even", (a,))
        if a >= 3 and a % 2 == 1:
            return FamilySpec("R_odd", (a,))
        raise MalformedInputError(f"R:{a}: m must be even >= 2 or odd >= 3")
    if name == "Q":
        return FamilySpec("Q_tower", (a,))
    if name == "Qpow":
        return FamilySpec("Q_tower_power", (a, int(b)))
    return FamilySpec("P4_power", (a,))


def r2() -> Polynomial:
    """x1^2 - x2^2 + x1 x2."""
    return from_terms(2, [((2, 0), 1), ((0, 2), -1), ((1, 1), 1)])


def p4() -> Polynomial:
    """x^3 y - x y^3."""
    return from_terms(2, [((3, 1), 1), ((1, 3), -1)])


@lru_cache(maxsize=None)
def r_even(m: int) -> Polynomial:
    """Product of m/2 copies of R2 on consecutive disjoint variable pairs."""
    FamilySpec("R_even", (m,))
    out = r2()
    for _ in range(m // 2 - 1):
        out = disjoint_product(out, r2())
    return out


@lru_cache(maxsize=None)
def r_odd(m: int) -> Polynomial:
    """(x_{2m} + x_{2m-1}) R_{m-1}(x_1..x_{m-1}) + (x_{2m} - x_{2m-1}) R_{m-1}(x_m..x_{2m-2}).

    Variables are 0-based here: the copies sit on 0..m-2 and m-1..2m-3, the
    linear factors use 2m-2 and 2m-1.
    """
    FamilySpec("R_odd", (m,))
    n = 2 * m
    base = r_even(m - 1)
    first = embed(base, n, 0)
    second = embed(base, n, m - 1)
    a, b = variable(n, n - 1), variable(n, n - 2)
    return (a + b) * first + (a - b) * second


@lru_cache(maxsize=None)
def q_tower(k: int) -> Polynomial:
    """Q_{2^k} on 2^k variables: Q(first half)^2 - Q(second half)^2, Q_1 = x."""
    FamilySpec("Q_tower", (k,))
    prev = variable(1, 0)
    for level in range(1, k + 1):
        n = 2**level
        sq = power(prev, 2)
        prev = embed(sq, n, 0) - embed(sq, n, n // 2)
    return prev


@lru_cache(maxsize=None)
def q_tower_power(k: int, n: int) -> Polynomial:
    FamilySpec("Q_tower_power", (k, n))
    return power(q_tower(k), n)


@lru_cache(maxsize=None)
def p4_power(n: int) -> Polynomial:
    FamilySpec("P4_power", (n,))
    return power(p4(), n)


def build(spec: FamilySpec | str) -> Polynomial:
    """Construct the polynomial named by ``spec``."""
    if isinstance(spec, str):
        spec = parse_spec(spec)
    if spec.kind == "R_even":
        return r_even(*spec.params)
    if spec.kind == "R_odd":
        return r_odd(*spec.params)
    if spec.kind == "Q_tower":
        return q_tower(*spec.params)
    if spec.kind == "Q_tower_power":
        return q_tower_power(*spec.params)
    return p4_power(*spec.params)


def complexify(p: Polynomial) -> Polynomial:
    """The complexification keeps the coefficients; only evaluation changes.

    Evaluate the result with :func:`bhcert.polycore.eval_complex`.
    """
    return p


def builtin_specs(max_vars: int | None = None, max_degree: int | None = None) -> list[FamilySpec]:
    """The desk-scale family members used by the checks and sweeps."""
    specs = [FamilySpec("R_even", (m,)) for m in (2, 4, 6, 8, 10)]
    specs += [FamilySpec("R_odd", (m,)) for m in (3, 5)]
    specs += [FamilySpec("Q_tower", (k,)) for k in (1, 2, 3)]
    specs += [FamilySpec("Q_tower_power", (1, n)) for n in range(1, 5)]
    specs += [FamilySpec("Q_tower_power", (2, n)) for n in range(1, 4)]
    specs += [FamilySpec("P4_power", (n,)) for n in range(1, 7)]
    if max_vars is not None:
        specs = [s for s in specs if s.n_vars <= max_vars]
    if max_degree is not None:
        specs = [s for s in specs if s.degree <= max_degree]
    return specs
