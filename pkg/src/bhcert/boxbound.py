"""Certified enclosures of sup norms over boxes.

The generic route is Bernstein branch-and-bound. The Bernstein
coefficients on the root box are computed exactly; subdivision runs in
float64 with every rounding error captured by an error-free TwoSum and
accumulated into a per-box bound, so upper bounds stay rigorous (and stay
exact whenever no rounding happens). Incumbent lower bounds are always
exact rational evaluations at explicit points.

Additively separable inputs (variable sets that never share a monomial)
are split into components whose maxima and minima are bounded
separately; this is what keeps Q-tower shaped inputs tractable.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import families
from .errors import BudgetExceededError, MalformedInputError, UnsupportedFamilyError
from .families import FamilySpec
from .normcalc import coeff_l1, round_down, round_up
from .polycore import (
    Polynomial,
    as_arrays,
    eval_many,
    eval_real,
    from_terms,
    neg,
    var_degrees,
)

DEFAULT_TOL = 1e-9
DEFAULT_BOX_BUDGET = 10**6
DEFAULT_TENSOR_BUDGET = 200_000
_PROBE_BUDGET = 20_000

METHODS = ("bernstein", "structural", "l1-fallback", "grid-lower-only")


def box_budget() -> int:
    """Box budget, overridable through ``BHCERT_BUDGET``."""
    raw = os.environ.get("BHCERT_BUDGET")
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise MalformedInputError(f"BHCERT_BUDGET must be an integer, got {raw!r}")
        if value < 1:
            raise MalformedInputError("BHCERT_BUDGET must be positive")
        return value
    return DEFAULT_BOX_BUDGET


@dataclass(frozen=True)
class Box:
    intervals: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        for a, b in self.intervals:
            if a > b:
                raise MalformedInputError(f"interval [{a}, {b}] is empty")

    @classmethod
    def unit(cls, n: int) -> Box:
        return cls(tuple((Fraction(-1), Fraction(1)) for _ in range(n)))

    @property
    def dim(self) -> int:
        return len(self.intervals)


@dataclass
class RangeEnclosure:
    """lo <= sup norm <= hi, with provenance."""

    lo: float
    hi: float
    method: str
    tol: float | None = None
    converged: bool = True
    boxes_explored: int = 0
    witness: tuple | None = field(default=None, compare=False)
    history: list = field(default_factory=list, compare=False, repr=False)

    def __post_init__(self):
        if self.method not in METHODS:
            raise MalformedInputError(f"unknown enclosure method {self.method!r}")
        if self.lo < 0 or self.lo > self.hi:
            raise ValueError(f"invalid enclosure [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def to_dict(self) -> dict:
        return {
            "lo": self.lo,
            "hi": self.hi,
            "method": self.method,
            "tol": self.tol,
            "converged": self.converged,
            "boxes_explored": self.boxes_explored,
        }


# --------------------------------------------------------------------------
# Exact Bernstein conversion


def _monomial_matrix(a: Fraction, b: Fraction, d: int) -> np.ndarray:
    """Row j holds the degree-d Bernstein coefficients of x^j on [a, b]."""
    w = b - a
    mat = np.empty((d + 1, d + 1), dtype=object)
    for j in range(d + 1):
        for l in range(d + 1):
            s = Fraction(0)
            for k in range(min(j, l) + 1):
                s += (
                    math.comb(j, k) * a ** (j - k) * w**k
                    * Fraction(math.comb(l, k), math.comb(d, k))
                )
            mat[j, l] = s
    return mat


def bernstein_coefficients(
    p: Polynomial, box: Box | None = None, budget: int = DEFAULT_TENSOR_BUDGET
) -> np.ndarray:
    """Exact tensor of Bernstein coefficients (object array of Fractions).

    The degree in each variable is that variable's largest exponent.
    """
    box = box or Box.unit(p.n_vars)
    if box.dim != p.n_vars:
        raise MalformedInputError("box dimension does not match the polynomial")
    degs = var_degrees(p)
    shape = tuple(d + 1 for d in degs)
    size = math.prod(shape)
    if size > budget:
        raise BudgetExceededError(
            f"Bernstein tensor of size {size} exceeds budget {budget}; "
            "use structural_sup_norm or l1_upper"
        )
    power = np.zeros(shape, dtype=object)
    power[...] = Fraction(0)
    for alpha, c in p.items():
        power[alpha] += c
    out = power
    for axis, (d, (a, b)) in enumerate(zip(degs, box.intervals)):
        # tensordot appends the contracted axis at the end; after n passes
        # the original order is restored.
        out = np.tensordot(out, _monomial_matrix(a, b, d), axes=([0], [0]))
    return out


def _corner_index(shape: Sequence[int], bits: Sequence[int]) -> tuple[int, ...]:
    return tuple((s - 1) if bit else 0 for s, bit in zip(shape, bits))


def bernstein_enclosure(p: Polynomial, box: Box | None = None,
                        budget: int = DEFAULT_TENSOR_BUDGET) -> RangeEnclosure:
    """One-shot enclosure of sup |P| over ``box`` from the Bernstein coefficients.

    ``lo`` is the largest |P| at a box vertex (vertex coefficients are
    exact point values), ``hi`` the largest |coefficient|.
    """
    if p.is_zero():
        return RangeEnclosure(0.0, 0.0, "bernstein", converged=True, boxes_explored=1)
    coeffs = bernstein_coefficients(p, box, budget)
    hi = max(abs(c) for c in coeffs.flat)
    lo = Fraction(0)
    for bits in np.ndindex(*([2] * p.n_vars)):
        lo = max(lo, abs(coeffs[_corner_index(coeffs.shape, bits)]))
    return RangeEnclosure(round_down(lo), round_up(hi), "bernstein", boxes_explored=1)


# --------------------------------------------------------------------------
# Point polishing


def _univariate_slice(exps, coeffs, x: np.ndarray, i: int, deg: int) -> np.ndarray:
    """Coefficients (low to high) of t -> P(x with x_i = t)."""
    others = np.ones(len(coeffs), dtype=x.dtype)
    for k in range(exps.shape[1]):
        if k != i:
            others = others * x[k] ** exps[:, k]
    out = np.zeros(deg + 1, dtype=x.dtype)
    np.add.at(out, exps[:, i], coeffs * others)
    return out


def polish_real(p: Polynomial, x0, iters: int = 20, signed: bool = False) -> np.ndarray:
    """Coordinate ascent of |P| (or P when ``signed``) over [-1, 1]^n.

    Each step maximizes exactly along one coordinate using the critical
    points of the univariate restriction.
    """
    exps, coeffs = as_arrays(p)
    x = np.array(x0, dtype=float)
    degs = var_degrees(p)
    score = (lambda v: v) if signed else abs
    best = score(float(eval_many(p, x[None, :])[0]))
    for _ in range(iters):
        improved = False
        for i, d in enumerate(degs):
            if d == 0:
                continue
            g = _univariate_slice(exps, coeffs, x, i, d)
            cands = [-1.0, 1.0, x[i]]
            if d >= 2:
                dg = np.polynomial.polynomial.polyder(g)
                for r in np.polynomial.polynomial.polyroots(dg):
                    if abs(r.imag) < 1e-12 and -1.0 <= r.real <= 1.0:
                        cands.append(float(r.real))
            vals = [score(float(np.polynomial.polynomial.polyval(t, g))) for t in cands]
            j = int(np.argmax(vals))
            if vals[j] > best + 1e-15 * max(1.0, abs(best)):
                best, x[i] = vals[j], cands[j]
                improved = True
        if not improved:
            break
    return x


def _start_points(n: int, count: int = 32, seed: int = 0) -> np.ndarray:
    if 3**n <= 6561:
        grid = np.array(np.meshgrid(*[[-1.0, 0.0, 1.0]] * n, indexing="ij")).reshape(n, -1).T
    else:
        grid = np.empty((0, n))
    rng = np.random.default_rng(seed)
    return np.vstack([grid, rng.uniform(-1.0, 1.0, size=(count, n))])


def polished_lower(p: Polynomial, signed: bool = False, starts: int = 4,
                   iters: int = 20) -> tuple[Fraction, tuple[Fraction, ...]]:
    """Exact value of |P| (or P) at the best polished point, and that point."""
    n = p.n_vars
    pts = _start_points(n)
    vals = eval_many(p, pts)
    vals = vals if signed else np.abs(vals)
    order = np.argsort(-vals, kind="stable")[:starts]
    best, best_pt = None, None
    for idx in order:
        x = polish_real(p, pts[idx], iters, signed)
        exact_pt = tuple(Fraction(float(v)) for v in x)
        v = eval_real(p, exact_pt)
        v = v if signed else abs(v)
        if best is None or v > best:
            best, best_pt = v, exact_pt
    return best, best_pt


# --------------------------------------------------------------------------
# Branch and bound


_TINY = 2.0**-1000


def _two_sum_err(a: np.ndarray, b: np.ndarray):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def _split(C: np.ndarray, axis: int):
    """Midpoint de Casteljau along ``axis`` (batch axis 0 excluded).

    Returns left and right coefficient arrays and a per-box bound on the
    rounding error introduced.
    """
    X = np.moveaxis(C, axis + 1, 1)
    d = X.shape[1] - 1
    left = [X[:, 0]]
    right = [X[:, d]]
    err = np.zeros(X.shape[0])
    cur = X
    for _ in range(d):
        s, e = _two_sum_err(cur[:, :-1], cur[:, 1:])
        cur = s * 0.5
        if e.size:
            err = err + np.abs(e).reshape(e.shape[0], -1).max(axis=1) * 0.5
        nz = cur[cur != 0]
        if nz.size and np.abs(nz).min() < _TINY:
            err = err + _TINY
        left.append(cur[:, 0])
        right.append(cur[:, -1])
    L = np.moveaxis(np.stack(left, axis=1), 1, axis + 1)
    R = np.moveaxis(np.stack(right[::-1], axis=1), 1, axis + 1)
    return L, R, err


def _up(x: np.ndarray) -> np.ndarray:
    return np.nextafter(x, np.inf)


@dataclass
class _BBResult:
    lo: Fraction
    hi: Fraction
    point: tuple
    converged: bool
    boxes: int
    history: list


def _maximize(p: Polynomial, signed: bool, tol: float, budget: int,
              tensor_budget: int = DEFAULT_TENSOR_BUDGET) -> _BBResult:
    """Enclose max P (``signed``) or max |P| over [-1, 1]^n."""
    n = p.n_vars
    score = (lambda v: v) if signed else abs
    exact = bernstein_coefficients(p, None, tensor_budget)
    shape = exact.shape
    C = np.array([float(c) for c in exact.flat]).reshape((1,) + shape)
    err0 = max((abs(Fraction(float(c)) - c) for c in exact.flat), default=Fraction(0))
    err = np.array([round_up(err0)])

    lo, point = polished_lower(p, signed)
    lower = np.full((1, n), -1.0)
    width = np.full((1, n), 2.0)
    parent_ub = np.array([np.inf])
    parked_hi = -np.inf
    explored = 1
    history = []
    corner_bits = list(np.ndindex(*([2] * n)))
    exps, fcoeffs = as_arrays(p)

    def objective(arr):
        return arr if signed else np.abs(arr)

    while True:
        N = C.shape[0]
        flat = objective(C.reshape(N, -1))
        ub = flat.max(axis=1)
        ub = np.where(err > 0, _up(ub + err), ub)
        ub = np.minimum(ub, parent_ub)

        # Incumbent from box vertices: vertex coefficients are P at the corners.
        corner_vals = np.stack(
            [objective(C[(slice(None),) + _corner_index(shape, bits)]) for bits in corner_bits],
            axis=1,
        )
        b_idx, c_idx = np.unravel_index(int(np.argmax(corner_vals)), corner_vals.shape)
        if corner_vals[b_idx, c_idx] - err[b_idx] > float(lo):
            bits = corner_bits[c_idx]
            pt = tuple(Fraction(float(lower[b_idx, i] + (width[b_idx, i] if bits[i] else 0.0)))
                       for i in range(n))
            v = score(eval_real(p, pt))
            if v > lo:
                lo, point = v, pt
        # ... and from box centres.
        centres = lower + width / 2
        cvals = objective(_eval_arrays(exps, fcoeffs, centres))
        j = int(np.argmax(cvals))
        if cvals[j] > float(lo):
            pt = tuple(Fraction(float(v)) for v in centres[j])
            v = score(eval_real(p, pt))
            if v > lo:
                lo, point = v, pt

        lo_f = round_down(lo)
        keep = ub > lo_f
        park = keep & (ub - lo_f <= tol)
        if park.any():
            parked_hi = max(parked_hi, float(ub[park].max()))
        live = keep & ~park
        live_hi = float(ub[live].max()) if live.any() else -np.inf
        hi = max(Fraction(max(parked_hi, live_hi)) if max(parked_hi, live_hi) > -np.inf
                 else lo, lo)
        history.append((lo_f, round_up(hi)))
        if not live.any():
            return _BBResult(lo, hi, point, True, explored, history)
        if explored + 2 * int(live.sum()) > budget:
            return _BBResult(lo, hi, point, False, explored, history)

        C, err, lower, width, ub = C[live], err[live], lower[live], width[live], ub[live]
        N = C.shape[0]
        variation = np.zeros((N, n))
        for k in range(n):
            if shape[k] > 1:
                variation[:, k] = np.abs(np.diff(C, axis=k + 1)).reshape(N, -1).max(axis=1)
        axes = np.argmax(variation, axis=1)

        parts_C, parts_err, parts_lower, parts_width, parts_ub = [], [], [], [], []
        for k in np.unique(axes):
            idx = np.nonzero(axes == k)[0]
            L, R, e = _split(C[idx], int(k))
            new_err = _up(err[idx] + e)
            new_err = np.where((err[idx] == 0) & (e == 0), 0.0, new_err)
            half = width[idx].copy()
            half[:, k] /= 2
            right_lower = lower[idx].copy()
            right_lower[:, k] += half[:, k]
            parts_C += [L, R]
            parts_err += [new_err, new_err]
            parts_lower += [lower[idx], right_lower]
            parts_width += [half, half]
            parts_ub += [ub[idx], ub[idx]]
        C = np.concatenate(parts_C)
        err = np.concatenate(parts_err)
        lower = np.concatenate(parts_lower)
        width = np.concatenate(parts_width)
        parent_ub = np.concatenate(parts_ub)
        explored += C.shape[0]


def _eval_arrays(exps: np.ndarray, coeffs: np.ndarray, pts: np.ndarray) -> np.ndarray:
    out = np.zeros(pts.shape[0])
    for alpha, c in zip(exps, coeffs):
        term = np.full(pts.shape[0], c)
        for i, e in enumerate(alpha):
            if e:
                term = term * pts[:, i] ** int(e)
        out += term
    return out


def separable_components(p: Polynomial) -> tuple[Fraction, list[list[int]]]:
    """Constant term and the groups of variables that interact in some monomial."""
    parent = list(range(p.n_vars))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    used = set()
    const = Fraction(0)
    for alpha, c in p.items():
        support = [i for i, e in enumerate(alpha) if e]
        if not support:
            const = c
            continue
        used.update(support)
        for i in support[1:]:
            parent[find(i)] = find(support[0])
    groups: dict[int, list[int]] = {}
    for i in sorted(used):
        groups.setdefault(find(i), []).append(i)
    return const, sorted(groups.values())


def restrict(p: Polynomial, variables: Sequence[int]) -> Polynomial:
    """Terms of ``p`` supported on ``variables``, re-indexed to 0..len-1."""
    keep = set(variables)
    terms = []
    for alpha, c in p.items():
        support = {i for i, e in enumerate(alpha) if e}
        if support and support <= keep:
            terms.append((tuple(alpha[i] for i in variables), c))
    return from_terms(len(variables), terms)


def certified_sup_norm(p: Polynomial, tol: float = DEFAULT_TOL,
                       budget: int | None = None,
                       tensor_budget: int = DEFAULT_TENSOR_BUDGET) -> RangeEnclosure:
    """Branch-and-bound enclosure of sup |P| over [-1, 1]^n, width <= tol.

    If the box budget runs out, the best sound enclosure so far is
    returned with ``converged=False``.
    """
    if tol < 0:
        raise MalformedInputError("tol must be non-negative")
    budget = box_budget() if budget is None else budget
    if p.is_zero():
        return RangeEnclosure(0.0, 0.0, "bernstein", tol, True, 0, witness=(0,) * p.n_vars)
    const, groups = separable_components(p)
    if not groups:
        c = abs(const)
        return RangeEnclosure(round_down(c), round_up(c), "bernstein", tol, True, 1,
                              witness=(Fraction(0),) * p.n_vars)

    if len(groups) == 1:
        sub = restrict(p, groups[0]) if len(groups[0]) < p.n_vars else p
        if const and sub.n_vars < p.n_vars:
            sub = sub + from_terms(sub.n_vars, [((0,) * sub.n_vars, const)])
        res = _maximize(sub, False, tol, budget, tensor_budget)
        witness = _scatter(p.n_vars, [(groups[0], res.point)])
        return RangeEnclosure(round_down(res.lo), round_up(res.hi), "bernstein", tol,
                              res.converged, res.boxes, witness, res.history)

    # Additively separable: max P and max -P are sums over components.
    # A cheap probe settles the easy components; the tolerance they leave
    # unused and the remaining box budget go to the rest.
    k = len(groups)
    comps = {(sign, i): (restrict(p, g) if sign > 0 else neg(restrict(p, g)))
             for sign in (1, -1) for i, g in enumerate(groups)}
    probe = min(_PROBE_BUDGET, max(1, budget // (2 * k)))
    results = {key: _maximize(c, True, tol / k, probe, tensor_budget)
               for key, c in comps.items()}
    used = sum(r.boxes for r in results.values())
    pending = [key for key, r in results.items() if not r.converged]
    if pending:
        share = max(1, (budget - used) // len(pending))
        for sign, i in pending:
            settled = [results[(sign, j)] for j in range(k)
                       if (sign, j) not in pending]
            spare = tol - sum(float(r.hi - r.lo) for r in settled)
            n_open = sum(1 for key in pending if key[0] == sign)
            res = _maximize(comps[(sign, i)], True, max(spare, 0.0) / n_open, share,
                            tensor_budget)
            used += res.boxes
            results[(sign, i)] = res

    sides = []
    for sign in (1, -1):
        side = [results[(sign, i)] for i in range(k)]
        lo_sum = sign * const + sum(r.lo for r in side)
        hi_sum = sign * const + sum(r.hi for r in side)
        pieces = [(g, r.point) for g, r in zip(groups, side)]
        sides.append((lo_sum, hi_sum, pieces))
    lo_side = max(sides, key=lambda s: s[0])
    lo = max(lo_side[0], Fraction(0))
    hi = max(sides[0][1], sides[1][1], lo)
    witness = _scatter(p.n_vars, lo_side[2])
    converged = all(r.converged for r in results.values())
    return RangeEnclosure(round_down(lo), round_up(hi), "bernstein", tol, converged, used,
                          witness)


def _scatter(n: int, pieces) -> tuple:
    pt = [Fraction(0)] * n
    for variables, sub_pt in pieces:
        for i, v in zip(variables, sub_pt):
            pt[i] = v
    return tuple(pt)


def l1_upper(p: Polynomial) -> RangeEnclosure:
    """|P(x)| <= sum |a_alpha| on the unit box."""
    return RangeEnclosure(0.0, round_up(coeff_l1(p)), "l1-fallback")


# --------------------------------------------------------------------------
# Structural rules for the built-in families


def power_enclosure(enc: RangeEnclosure, n: int, method: str = "structural") -> RangeEnclosure:
    """Enclosure of sup |P^n| = (sup |P|)^n from one of sup |P|."""
    lo = round_down(Fraction(enc.lo) ** n)
    hi = round_up(Fraction(enc.hi) ** n)
    return RangeEnclosure(lo, hi, method, enc.tol, enc.converged, enc.boxes_explored)


def _square_range(lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    if lo <= 0 <= hi:
        return Fraction(0), max(lo * lo, hi * hi)
    return min(lo * lo, hi * hi), max(lo * lo, hi * hi)


def q_tower_range(k: int) -> tuple[Fraction, Fraction]:
    """Exact range of Q_{2^k} on the unit box by propagation through A^2 - B^2.

    A and B live on disjoint variables, so the range of the difference is
    exactly the difference of the ranges; ranges of continuous functions on
    boxes are intervals, so endpoints are attained.
    """
    lo, hi = Fraction(-1), Fraction(1)
    for _ in range(k):
        s_lo, s_hi = _square_range(lo, hi)
        lo, hi = s_lo - s_hi, s_hi - s_lo
    return lo, hi


@lru_cache(maxsize=None)
def _block_enclosure(name: str, tol: float) -> RangeEnclosure:
    if name == "R2":
        # tol=0 asks for an exact enclosure; the dyadic maximizer (1, 1/2) makes it reachable.
        enc = certified_sup_norm(families.r2(), 0.0, budget=200_000)
        if enc.converged:
            return enc
        return certified_sup_norm(families.r2(), tol)
    return certified_sup_norm(families.p4(), tol)


def structural_sup_norm(spec: FamilySpec, tol: float = DEFAULT_TOL) -> RangeEnclosure:
    """Sup-norm enclosure of a family member from its construction."""
    if not isinstance(spec, FamilySpec):
        raise UnsupportedFamilyError(
            "structural rules only cover FamilySpec inputs; use certified_sup_norm"
        )
    kind, params = spec.kind, spec.params
    if kind == "R_even":
        block = _block_enclosure("R2", tol)
        return power_enclosure(block, params[0] // 2)
    if kind == "R_odd":
        m = params[0]
        inner = structural_sup_norm(FamilySpec("R_even", (m - 1,)), tol)
        # |(a+b)A + (a-b)B| <= (|a+b| + |a-b|) max(|A|, |B|) = 2 max(|a|,|b|) max(|A|,|B|)
        hi = round_up(2 * Fraction(inner.hi))
        lo, pt = polished_lower(families.r_odd(m), starts=8)
        lo = min(lo, Fraction(hi))
        return RangeEnclosure(round_down(lo), hi, "structural", tol, inner.converged,
                              inner.boxes_explored, witness=pt)
    if kind in ("Q_tower", "Q_tower_power"):
        lo, hi = q_tower_range(params[0])
        sup = max(abs(lo), abs(hi))
        n = params[1] if kind == "Q_tower_power" else 1
        return RangeEnclosure(float(sup**n), float(sup**n), "structural", tol, True, 0)
    if kind == "P4_power":
        return power_enclosure(_block_enclosure("P4", tol), params[0])
    raise UnsupportedFamilyError(f"no structural rule for {spec}; use certified_sup_norm")


def best_sup_enclosure(spec_or_poly, tol: float = DEFAULT_TOL) -> RangeEnclosure:
    """Structural enclosure for family specs, Bernstein branch-and-bound otherwise."""
    if isinstance(spec_or_poly, (FamilySpec, str)):
        spec = families.parse_spec(spec_or_poly) if isinstance(spec_or_poly, str) else spec_or_poly
        return structural_sup_norm(spec, tol)
    return certified_sup_norm(spec_or_poly, tol)


# --------------------------------------------------------------------------
# Complex (torus) estimates


_TORUS_POINT_CAP = 2_000_000


def _circle_max(g: np.ndarray, samples: int) -> tuple[float, float]:
    """max over phi of |sum g_j e^{i j phi}|, sampled then golden-section refined."""
    phis = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
    w = np.exp(1j * phis)
    vals = np.abs(np.polynomial.polynomial.polyval(w, g))
    j = int(np.argmax(vals))
    f = lambda t: abs(np.polynomial.polynomial.polyval(np.exp(1j * t), g))
    a, b = phis[j] - 2 * np.pi / samples, phis[j] + 2 * np.pi / samples
    ratio = (math.sqrt(5) - 1) / 2
    c, d = b - ratio * (b - a), a + ratio * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(60):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - ratio * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + ratio * (b - a)
            fd = f(d)
    t, ft = (c, fc) if fc > fd else (d, fd)
    if vals[j] >= ft:
        return float(phis[j]), float(vals[j])
    return float(t), float(ft)


def torus_sup_estimate(p: Polynomial, grid_per_dim: int = 64, polish_iters: int = 50) -> float:
    """Lower estimate of sup |P| over the closed unit polydisk.

    By the maximum modulus principle the polydisk sup is the sup over the
    torus |z_i| = 1. Homogeneous inputs have |P(e^{it} z)| = |P(z)|, so the
    first angle is pinned to 0. The grid is capped at about two million
    points (per-dimension resolution drops for many variables), then the
    best point is refined by coordinate-wise maximization on each circle.
    Never an upper bound.
    """
    if grid_per_dim < 4:
        raise MalformedInputError("grid_per_dim must be >= 4")
    if p.is_zero():
        return 0.0
    n = p.n_vars
    degs = [d for d in var_degrees(p)]
    total_degs = {sum(a) for a in p.terms}
    pinned = 1 if (len(total_degs) == 1 and n >= 1) else 0
    free = n - pinned
    g = grid_per_dim
    if free and g**free > _TORUS_POINT_CAP:
        g = max(4, int(_TORUS_POINT_CAP ** (1.0 / free)))
    exps, coeffs = as_arrays(p)
    ccoeffs = coeffs.astype(complex)

    angles = 2 * np.pi * np.arange(g) / g
    best_val, best_theta = -1.0, np.zeros(n)
    if free == 0:
        best_val = abs(complex(np.sum(ccoeffs)))
    else:
        grids = np.meshgrid(*([angles] * free), indexing="ij")
        flat = np.stack([gg.reshape(-1) for gg in grids], axis=1)
        chunk = 200_000
        for start in range(0, flat.shape[0], chunk):
            th = flat[start:start + chunk]
            full = np.hstack([np.zeros((th.shape[0], pinned)), th])
            z = np.exp(1j * full)
            vals = np.abs(eval_many(p, z))
            j = int(np.argmax(vals))
            if vals[j] > best_val:
                best_val, best_theta = float(vals[j]), full[j].copy()

    theta = best_theta.copy()
    current = best_val
    for _ in range(polish_iters):
        improved = False
        for i in range(pinned, n):
            if degs[i] == 0:
                continue
            z = np.exp(1j * theta)
            gcoef = _univariate_slice(exps, ccoeffs, z, i, degs[i])
            phi, val = _circle_max(gcoef, max(32, 8 * degs[i]))
            if val > current * (1 + 1e-15):
                theta[i], current = phi, val
                improved = True
        if not improved:
            break
    return max(best_val, current)
