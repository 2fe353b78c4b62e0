"""Exact sparse multivariate polynomials with rational coefficients.

A polynomial is an immutable map from exponent vectors (tuples of
non-negative ints, one entry per variable) to nonzero ``Fraction``
coefficients. Variables are 0-based; the 1-based names ``x1..xn`` only
appear in ``__str__``.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Tuple, Union

import numpy as np

from .errors import MalformedInputError

MultiIndex = Tuple[int, ...]
Coefficient = Union[int, Fraction]


def total_degree(alpha: MultiIndex) -> int:
    """|alpha|, the sum of the exponents."""
    return sum(alpha)


def _check_index(alpha: Sequence[int], n_vars: int) -> MultiIndex:
    alpha = tuple(alpha)
    if len(alpha) != n_vars:
        raise MalformedInputError(
            f"multi-index {alpha} has length {len(alpha)}, expected {n_vars}"
        )
    for e in alpha:
        if not isinstance(e, (int, np.integer)) or e < 0:
            raise MalformedInputError(f"exponents must be non-negative ints, got {alpha}")
    return tuple(int(e) for e in alpha)


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, np.integer)) and not isinstance(c, bool):
        return Fraction(int(c))
    if isinstance(c, Rational):
        return Fraction(c.numerator, c.denominator)
    if isinstance(c, str):
        return Fraction(c)
    raise MalformedInputError(
        f"coefficients must be exact rationals (int, Fraction or 'p/q' string), got {c!r}"
    )


class Polynomial:
    """Immutable sparse polynomial over the rationals in ``n_vars`` variables."""

    __slots__ = ("_n_vars", "_terms", "_hash")

    def __init__(self, n_vars: int, terms: Mapping[MultiIndex, Fraction] | None = None):
        # Trusted constructor: callers outside this module go through from_terms.
        if n_vars < 0:
            raise MalformedInputError("n_vars must be non-negative")
        self._n_vars = n_vars
        self._terms = dict(terms) if terms else {}
        self._hash = None

    @property
    def n_vars(self) -> int:
        return self._n_vars

    @property
    def terms(self) -> Mapping[MultiIndex, Fraction]:
        return MappingProxyType(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, alpha: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(alpha), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._n_vars == other._n_vars and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._n_vars, frozenset(self._terms.items())))
        return self._hash

    def __add__(self, other: Polynomial) -> Polynomial:
        return add(self, other)

    def __sub__(self, other: Polynomial) -> Polynomial:
        return add(self, neg(other))

    def __neg__(self) -> Polynomial:
        return neg(self)

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            return mul(self, other)
        return scale(self, other)

    def __rmul__(self, other):
        return scale(self, other)

    def __pow__(self, n: int) -> Polynomial:
        return power(self, n)

    def __repr__(self) -> str:
        return f"Polynomial(n_vars={self._n_vars}, terms={len(self._terms)})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for alpha in sorted(self._terms, reverse=True):
            c = self._terms[alpha]
            mono = "*".join(
                f"x{i + 1}" if e == 1 else f"x{i + 1}^{e}"
                for i, e in enumerate(alpha)
                if e
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def from_terms(n_vars: int, terms: Iterable[tuple[Sequence[int], Coefficient]]) -> Polynomial:
    """Build a polynomial from (multi-index, coefficient) pairs.

    Duplicate indices are summed and zero results dropped.
    """
    acc: dict[MultiIndex, Fraction] = {}
    for alpha, c in terms:
        key = _check_index(alpha, n_vars)
        acc[key] = acc.get(key, Fraction(0)) + _as_fraction(c)
    return Polynomial(n_vars, {k: v for k, v in acc.items() if v != 0})


def zero(n_vars: int) -> Polynomial:
    return Polynomial(n_vars)


def constant(n_vars: int, c: Coefficient) -> Polynomial:
    c = _as_fraction(c)
    return Polynomial(n_vars, {(0,) * n_vars: c} if c else None)


def variable(n_vars: int, i: int) -> Polynomial:
    """The coordinate function x_i (0-based)."""
    if not 0 <= i < n_vars:
        raise MalformedInputError(f"variable index {i} out of range for {n_vars} variables")
    alpha = [0] * n_vars
    alpha[i] = 1
    return Polynomial(n_vars, {tuple(alpha): Fraction(1)})


def _same_space(p: Polynomial, q: Polynomial) -> None:
    if p.n_vars != q.n_vars:
        raise MalformedInputError(
            f"variable-count mismatch: {p.n_vars} vs {q.n_vars}"
        )


def add(p: Polynomial, q: Polynomial) -> Polynomial:
    _same_space(p, q)
    out = dict(p._terms)
    for alpha, c in q._terms.items():
        s = out.get(alpha, 0) + c
        if s:
            out[alpha] = s
        else:
            out.pop(alpha, None)
    return Polynomial(p.n_vars, out)


def neg(p: Polynomial) -> Polynomial:
    return Polynomial(p.n_vars, {a: -c for a, c in p._terms.items()})


def scale(p: Polynomial, c: Coefficient) -> Polynomial:
    c = _as_fraction(c)
    if c == 0:
        return zero(p.n_vars)
    return Polynomial(p.n_vars, {a: c * v for a, v in p._terms.items()})


def mul(p: Polynomial, q: Polynomial) -> Polynomial:
    """Exact product (convolution of the coefficient maps)."""
    _same_space(p, q)
    out: dict[MultiIndex, Fraction] = {}
    q_items = list(q._terms.items())
    for a, ca in p._terms.items():
        for b, cb in q_items:
            key = tuple(x + y for x, y in zip(a, b))
            out[key] = out.get(key, 0) + ca * cb
    return Polynomial(p.n_vars, {k: v for k, v in out.items() if v})


def power(p: Polynomial, n: int) -> Polynomial:
    """Exact n-th power by repeated squaring; ``power(p, 0)`` is the constant 1."""
    if n < 0:
        raise MalformedInputError("exponent must be non-negative")
    result = constant(p.n_vars, 1)
    base = p
    while n:
        if n & 1:
            result = mul(result, base)
        n >>= 1
        if n:
            base = mul(base, base)
    return result


def embed(p: Polynomial, n_vars: int, offset: int = 0) -> Polynomial:
    """Re-home ``p`` into ``n_vars`` variables, shifting its variables by ``offset``."""
    if offset < 0 or offset + p.n_vars > n_vars:
        raise MalformedInputError(
            f"cannot place {p.n_vars} variables at offset {offset} in {n_vars}"
        )
    pad_left = (0,) * offset
    pad_right = (0,) * (n_vars - offset - p.n_vars)
    return Polynomial(n_vars, {pad_left + a + pad_right: c for a, c in p._terms.items()})


def disjoint_product(p: Polynomial, q: Polynomial) -> Polynomial:
    """Product of ``p`` and ``q`` with ``q``'s variables relabeled after ``p``'s.

    The terms of the result are exactly the pairwise products, so the
    largest absolute coefficient factorizes.
    """
    out = {a + b: ca * cb for a, ca in p._terms.items() for b, cb in q._terms.items()}
    return Polynomial(p.n_vars + q.n_vars, out)


def degree(p: Polynomial) -> int | None:
    """Total degree, or ``None`` for the zero polynomial (degree undefined)."""
    if not p._terms:
        return None
    return max(sum(a) for a in p._terms)


def is_homogeneous(p: Polynomial, m: int) -> bool:
    """True iff every stored term has total degree ``m`` (False for zero)."""
    return bool(p._terms) and all(sum(a) == m for a in p._terms)


def var_degrees(p: Polynomial) -> tuple[int, ...]:
    """Largest exponent of each variable."""
    degs = [0] * p.n_vars
    for a in p._terms:
        for i, e in enumerate(a):
            if e > degs[i]:
                degs[i] = e
    return tuple(degs)


def max_abs_coeff(p: Polynomial) -> Fraction:
    return max((abs(c) for c in p._terms.values()), default=Fraction(0))


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, np.integer)) and not isinstance(x, bool)


def eval_real(p: Polynomial, x: Sequence):
    """Evaluate at a real point.

    Exact (a ``Fraction``) when every coordinate is an int or Fraction;
    otherwise plain float arithmetic, each term rounded once per multiply.
    """
    if len(x) != p.n_vars:
        raise MalformedInputError(f"point has {len(x)} coordinates, expected {p.n_vars}")
    if all(_is_exact(v) for v in x):
        pts = [Fraction(v) for v in x]
        total = Fraction(0)
    else:
        pts = [float(v) for v in x]
        total = 0.0
    for alpha, c in p._terms.items():
        term = c if isinstance(total, Fraction) else float(c)
        for v, e in zip(pts, alpha):
            if e:
                term *= v**e
        total += term
    return total


def eval_complex(p: Polynomial, z: Sequence[complex]) -> complex:
    """Evaluate the complexification (same coefficients) at a complex point."""
    if len(z) != p.n_vars:
        raise MalformedInputError(f"point has {len(z)} coordinates, expected {p.n_vars}")
    pts = [complex(v) for v in z]
    total = 0j
    for alpha, c in p._terms.items():
        term = complex(float(c))
        for v, e in zip(pts, alpha):
            if e:
                term *= v**e
        total += term
    return total


def as_arrays(p: Polynomial) -> tuple[np.ndarray, np.ndarray]:
    """Exponent matrix (terms x vars) and float coefficient vector, for vectorized evaluation."""
    if not p._terms:
        return np.zeros((0, p.n_vars), dtype=np.int64), np.zeros(0)
    keys = sorted(p._terms)
    exps = np.array(keys, dtype=np.int64).reshape(len(keys), p.n_vars)
    coeffs = np.array([float(p._terms[k]) for k in keys])
    return exps, coeffs


def eval_many(p: Polynomial, points: np.ndarray) -> np.ndarray:
    """Evaluate at each row of ``points`` (real or complex) in floating arithmetic."""
    points = np.asarray(points)
    exps, coeffs = as_arrays(p)
    out = np.zeros(points.shape[0], dtype=np.result_type(points.dtype, np.float64))
    for alpha, c in zip(exps, coeffs):
        term = np.full(points.shape[0], c, dtype=out.dtype)
        for i, e in enumerate(alpha):
            if e:
                term = term * points[:, i] ** int(e)
        out += term
    return out


def to_text(p: Polynomial) -> str:
    """Canonical serialization: ``num/den : e1 ... en`` per term, lexicographic order."""
    lines = [f"# n_vars {p.n_vars}"]
    for alpha in sorted(p._terms):
        c = p._terms[alpha]
        lines.append(f"{c.numerator}/{c.denominator} : {' '.join(map(str, alpha))}".rstrip())
    return "\n".join(lines) + "\n"


def from_text(text: str, n_vars: int | None = None) -> Polynomial:
    """Parse the canonical serialization written by :func:`to_text`."""
    terms = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            fields = line[1:].split()
            if len(fields) == 2 and fields[0] == "n_vars":
                n_vars = int(fields[1])
            continue
        if ":" not in line:
            raise MalformedInputError(f"expected 'num/den : exponents', got {raw!r}")
        coeff, _, exps = line.partition(":")
        try:
            alpha = tuple(int(e) for e in exps.split())
            terms.append((alpha, Fraction(coeff.strip())))
        except ValueError as exc:
            raise MalformedInputError(f"bad term line {raw!r}") from exc
    if n_vars is None:
        if not terms:
            raise MalformedInputError("cannot infer n_vars for an empty polynomial")
        n_vars = len(terms[0][0])
    return from_terms(n_vars, terms)
