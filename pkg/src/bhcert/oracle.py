"""Brute-force validators, kept independent of the certificate code paths.

Nothing in here is used to produce certificates. The grid evaluator, the
naive expander and the integer identity loops exist so that tests can
compare the production routines against something written differently.
"""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import numpy as np

from .errors import BudgetExceededError, MalformedInputError
from .families import FamilySpec, parse_spec
from .polycore import Polynomial

GRID_MAX_VARS = 6
GRID_MAX_POINTS = 2 * 10**8
EXPAND_MAX_TERMS = 10**6


def _grid_coords(points_per_dim: int) -> list[Fraction]:
    den = points_per_dim - 1
    return [Fraction(2 * i - den, den) for i in range(points_per_dim)]


def grid_sup_lower(p: Polynomial, points_per_dim: int = 101) -> float:
    """max |P| over the uniform grid on [-1, 1]^n, endpoints included.

    The scan runs in floating point; the best grid point of each slab is
    then re-evaluated exactly, so the returned value is |P| at an actual
    grid point (rounded down) and never exceeds the true sup norm.
    Refining the grid by a factor that keeps the old nodes cannot lower it.
    """
    if points_per_dim < 2:
        raise MalformedInputError("points_per_dim must be >= 2")
    n = p.n_vars
    if n > GRID_MAX_VARS or points_per_dim**n > GRID_MAX_POINTS:
        raise BudgetExceededError(
            f"grid of {points_per_dim}^{n} points exceeds the oracle cost guard"
        )
    if not p.terms:
        return 0.0
    if n == 0:
        return float(abs(next(iter(p.terms.values()))))

    degs = [max(a[i] for a in p.terms) for i in range(n)]
    dense = np.zeros([d + 1 for d in degs])
    for alpha, c in p.terms.items():
        dense[alpha] = float(c)
    exact_coords = _grid_coords(points_per_dim)
    xs = np.array([(2 * i - (points_per_dim - 1)) / (points_per_dim - 1)
                   for i in range(points_per_dim)])
    vander = [np.vander(xs, d + 1, increasing=True) for d in degs]

    best = Fraction(0)
    for i0 in range(points_per_dim):
        # Fix the first coordinate, then contract the remaining axes.
        slab = np.tensordot(vander[0][i0], dense, axes=([0], [0]))
        for k in range(1, n):
            slab = np.tensordot(slab, vander[k], axes=([0], [1]))
        vals = np.abs(np.atleast_1d(slab))
        j = np.unravel_index(int(np.argmax(vals)), vals.shape) if n > 1 else ()
        point = [exact_coords[i0]] + [exact_coords[int(t)] for t in j]
        v = abs(_exact_eval(p, point))
        if v > best:
            best = v
    f = float(best)
    return f if Fraction(f) <= best else math.nextafter(f, -math.inf)


def _exact_eval(p: Polynomial, point) -> Fraction:
    total = Fraction(0)
    for alpha, c in p.terms.items():
        term = c
        for x, e in zip(point, alpha):
            term *= x**e
        total += term
    return total


# --------------------------------------------------------------------------
# Naive expansion of the families


def _naive_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            key = tuple(x + y for x, y in zip(ea, eb))
            out[key] = out.get(key, 0) + ca * cb
            if len(out) > EXPAND_MAX_TERMS:
                raise BudgetExceededError("naive expansion exceeds the term cost guard")
    return {k: v for k, v in out.items() if v}


def _naive_add(a: dict, b: dict, sign: int = 1) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + sign * v
    return {k: v for k, v in out.items() if v}


def _mono(n: int, exps: dict[int, int]) -> tuple:
    return tuple(exps.get(i, 0) for i in range(n))


def _r2_block(n: int, i: int) -> dict:
    # x_i^2 - x_{i+1}^2 + x_i x_{i+1}
    return {_mono(n, {i: 2}): 1, _mono(n, {i + 1: 2}): -1, _mono(n, {i: 1, i + 1: 1}): 1}


def _naive_r_even(n: int, m: int, offset: int) -> dict:
    out = {_mono(n, {}): 1}
    for j in range(m // 2):
        out = _naive_mul(out, _r2_block(n, offset + 2 * j))
    return out


def _naive_q(n: int, k: int, offset: int) -> dict:
    if k == 0:
        return {_mono(n, {offset: 1}): 1}
    half = 2 ** (k - 1)
    a = _naive_q(n, k - 1, offset)
    b = _naive_q(n, k - 1, offset + half)
    return _naive_add(_naive_mul(a, a), _naive_mul(b, b), -1)


def _naive_pow(base: dict, n_vars: int, e: int) -> dict:
    out = {_mono(n_vars, {}): 1}
    for _ in range(e):
        out = _naive_mul(out, base)
    return out


def naive_expand(spec: FamilySpec | str) -> dict[tuple, int]:
    """Coefficient map of a family member by plain repeated multiplication."""
    if isinstance(spec, str):
        spec = parse_spec(spec)
    kind, params = spec.kind, spec.params
    if kind == "R_even":
        m = params[0]
        return _naive_r_even(m, m, 0)
    if kind == "R_odd":
        m = params[0]
        n = 2 * m
        first = _naive_r_even(n, m - 1, 0)
        second = _naive_r_even(n, m - 1, m - 1)
        a, b = _mono(n, {n - 1: 1}), _mono(n, {n - 2: 1})
        plus = {a: 1, b: 1}
        minus = {a: 1, b: -1}
        return _naive_add(_naive_mul(plus, first), _naive_mul(minus, second))
    if kind in ("Q_tower", "Q_tower_power"):
        k = params[0]
        q = _naive_q(2**k, k, 0)
        return q if kind == "Q_tower" else _naive_pow(q, 2**k, params[1])
    n = params[0]
    p4 = {(3, 1): 1, (1, 3): -1}
    return _naive_pow(p4, 2, n)


def same_coefficients(p: Polynomial, expansion: dict) -> bool:
    """Bit-exact comparison of a Polynomial with a naive coefficient map."""
    return dict(p.terms) == {k: Fraction(v) for k, v in expansion.items()}


# --------------------------------------------------------------------------
# Exact integer identities


def binom_identity_check(n_max: int) -> bool:
    """sum_k C(n,k)^2 == C(2n,n) for every 0 <= n <= n_max."""
    if n_max < 1:
        raise MalformedInputError("n_max must be >= 1")
    return all(
        sum(math.comb(n, k) ** 2 for k in range(n + 1)) == math.comb(2 * n, n)
        for n in range(n_max + 1)
    )


def odd_product_check(n_max: int) -> bool:
    """(2k+1)(2n-2k+1) <= (n+1)^2 for all 0 <= k <= n <= n_max."""
    return all(
        (2 * k + 1) * (2 * n - 2 * k + 1) <= (n + 1) ** 2
        for n in range(n_max + 1)
        for k in range(n + 1)
    )


def binomial_max_check(n_max: int) -> bool:
    """2^n <= (n+1) max_k C(n,k) for all 0 <= n <= n_max."""
    return all(
        2**n <= (n + 1) * max(math.comb(n, k) for k in range(n + 1))
        for n in range(n_max + 1)
    )


def stirling_gap(n: int, dps: int = 50) -> float:
    """|exact / asymptote - 1| for the two-variable P4-power bound at m = 4n.

    Both closed forms are evaluated here from scratch at ``dps`` digits.
    """
    if n < 1:
        raise MalformedInputError("n must be >= 1")
    with mpmath.workdps(dps):
        norm = 2 * mpmath.sqrt(3) / 9
        exact = mpmath.sqrt(mpmath.factorial(2 * n)) / (mpmath.factorial(n) * norm**n)
        m = 4 * n
        asym = (4 / (m * mpmath.pi)) ** mpmath.mpf(0.25) * mpmath.power(27, mpmath.mpf(m) / 8)
        return float(abs(exact / asym - 1))
