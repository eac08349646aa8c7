"""Sampling the ellipsoid embedding function and certifying staircases.

The embedding function of a domain is c_X(a) = sup_k N(1,a)_k / c_k(X),
the supremum of ratios of ECH capacities.  Truncating the supremum at a
certified prefix gives an exact rational lower bound at every rational
a, which is what this module samples, differentiates for corners, and
probes near accumulation points for the staircase obstruction.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction as Q
from math import isqrt

import numpy as np

from .capacities import _ellipsoid_prefix_scaled, ech_convex_toric
from .core import (
    NegativeWeightExpansion,
    QuadraticSurd,
    parse_expansion,
    solve_accumulation_quadratic,
    surd_sqrt,
)

__all__ = [
    "FunctionSample",
    "ObstructionReport",
    "accumulation_point",
    "detect_corners",
    "fit_linear_recurrence",
    "sample_embedding_function",
    "staircase_obstruction",
]


def _target(X) -> NegativeWeightExpansion:
    if isinstance(X, NegativeWeightExpansion):
        return X
    return parse_expansion(str(X))


@dataclass(frozen=True)
class FunctionSample:
    """One exact grid value of the truncated ratio supremum.

    value = max_{1 <= k < count} N(1,a)_k / c_k(X), a rigorous lower
    bound for c_X(a); witness_k attains it.  The value may sit below
    the volume curve when the prefix is short, so consumers compare
    against sqrt(a/vol) themselves.  certified records that every
    capacity entering the ratio came from a certified prefix.
    """

    a: Q
    value: Q
    witness_k: int
    certified: bool


def _ratio_sup(p: int, q: int, nums: np.ndarray, den: int) -> tuple[Q, int]:
    """Largest N(1, p/q)_k / (nums[k]/den) over 1 <= k < len(nums).

    The source prefix is generated scaled by q, so the ratio at k is
    source[k] * den / (q * nums[k]).  A float pass locates the
    candidates and exact integer cross-multiplication settles them.
    """
    count = len(nums)
    source = _ellipsoid_prefix_scaled(p, q, count)
    ratios = source[1:].astype(float) * den / (q * nums[1:].astype(float))
    top = ratios.max()
    near = np.nonzero(ratios >= top * (1.0 - 1e-9))[0]
    best_k = -1
    best_num = best_den = 1
    for i in near:
        k = int(i) + 1
        num = int(source[k]) * den
        d = q * int(nums[k])
        if best_k < 0 or num * best_den > best_num * d:
            best_k, best_num, best_den = k, num, d
    return Q(best_num, best_den), best_k


def sample_embedding_function(X, a_min, a_max, step, count: int, workers=None):
    """Exact lower-bound samples of c_X on a uniform rational grid.

    For each grid point a the value is the truncated ratio supremum
    over a certified capacity prefix of length `count`.  The prefix of
    X is computed once and shared; grid points are independent, so the
    evaluation can fan out over a thread pool.
    """
    target = _target(X)
    lo, hi, h = Q(a_min), Q(a_max), Q(step)
    if lo < 1:
        raise ValueError("the embedding function is sampled at a >= 1")
    if not lo < hi:
        raise ValueError("empty sampling interval")
    if h <= 0:
        raise ValueError("step must be positive")
    if count < 2:
        raise ValueError("count must cover at least the index k = 1")
    seq = ech_convex_toric(target, count)
    nums, den = seq.nums, seq.den
    grid = []
    a = lo
    while a <= hi:
        grid.append(a)
        a += h

    def at(a: Q) -> FunctionSample:
        value, k = _ratio_sup(a.numerator, a.denominator, nums, den)
        return FunctionSample(a, value, k, True)

    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(at, grid))
    return [at(a) for a in grid]


def accumulation_point(X) -> QuadraticSurd | None:
    """Root > 1 of z^2 - K z + 1 for K = per^2/vol - 2 of the target.

    None when the discriminant is negative (no real accumulation
    point); the rational-valued surd 1 at the degenerate K = 2.
    """
    return solve_accumulation_quadratic(_target(X).K)


@dataclass(frozen=True)
class ObstructionReport:
    """Outcome of probing the embedding function near a0.

    gap_positive = True is a rigorous certificate that c_X stays above
    the volume curve across a rational bracket of a0 (so no infinite
    staircase can accumulate there); False only means no gap was seen
    at this truncation.  volume_value is sqrt(a0/vol); when that root
    does not live in the field of a0 it is reported as a rational
    20-digit approximation instead (the certificate never uses it).
    """

    a0: QuadraticSurd
    volume_value: QuadraticSurd
    lower_bound: Q
    gap_positive: bool

    def as_dict(self):
        return {
            "a0": str(self.a0),
            "a0_decimal": self.a0.decimal_str(20),
            "volume_value": str(self.volume_value),
            "lower_bound": str(self.lower_bound),
            "gap_positive": self.gap_positive,
        }


def _sqrt_to_digits(x: QuadraticSurd, digits: int) -> QuadraticSurd:
    approx = Q(x.decimal_str(digits + 5))
    scale = 10**digits
    root = isqrt(approx.numerator * approx.denominator * scale * scale)
    return QuadraticSurd.from_rational(Q(root, approx.denominator * scale))


def _bracket_probes(a0: QuadraticSurd, radius: Q) -> tuple[Q, Q]:
    if a0.is_rational:
        a = a0.as_fraction()
        return a, a
    below = above = None
    for conv in a0.convergents(60):
        if conv < a0:
            if a0 - conv <= radius:
                below = conv
        elif conv - a0 <= radius:
            above = conv
        if below is not None and above is not None:
            break
    if below is None or above is None:
        raise ValueError(f"no convergent brackets a0 within radius {radius}")
    return below, above


def staircase_obstruction(X, count: int, probe_radius) -> ObstructionReport:
    """Probe the gap between c_X and the volume curve at a0.

    Rational probes bracket a0 (continued-fraction convergents, the
    tightest available), the truncated ratio supremum is evaluated
    exactly at both, and the gap is certified when both values clear
    sqrt(a_plus/vol): monotonicity of c_X then carries the strict
    inequality across the whole bracket, including a0 itself.
    """
    target = _target(X)
    a0 = accumulation_point(target)
    if a0 is None:
        raise ValueError(f"{target} has no accumulation point to probe")
    radius = Q(probe_radius)
    if radius <= 0:
        raise ValueError("probe radius must be positive")
    lo, hi = _bracket_probes(a0, radius)
    seq = ech_convex_toric(target, count)
    vol = target.vol
    value_lo, _ = _ratio_sup(lo.numerator, lo.denominator, seq.nums, seq.den)
    if hi == lo:
        value_hi = value_lo
    else:
        value_hi, _ = _ratio_sup(hi.numerator, hi.denominator, seq.nums, seq.den)
    gap = value_lo * value_lo * vol > hi and value_hi * value_hi * vol > hi
    root = surd_sqrt(a0 / vol)
    if root is None:
        root = _sqrt_to_digits(a0 / vol, 20)
    return ObstructionReport(a0, root, max(value_lo, value_hi), gap)


def detect_corners(samples, slope_tolerance):
    """Corner points of a uniformly sampled staircase graph.

    Reads exact discrete slopes and reports every grid point where the
    slope jumps by more than the tolerance: a drop lands the graph on a
    horizontal shelf (an outer corner), a rise leaves one (inner).
    """
    tol = Q(slope_tolerance)
    if tol < 0:
        raise ValueError("slope tolerance must be nonnegative")
    if len(samples) < 3:
        return []
    step = samples[1].a - samples[0].a
    for prev, here in zip(samples, samples[1:]):
        if here.a - prev.a != step:
            raise ValueError("corner detection needs a uniform grid")
    out = []
    slopes = [
        (here.value - prev.value) / step
        for prev, here in zip(samples, samples[1:])
    ]
    for i in range(1, len(slopes)):
        jump = slopes[i] - slopes[i - 1]
        if abs(jump) <= tol:
            continue
        kind = "outer" if jump < 0 else "inner"
        out.append((samples[i].a, samples[i].value, kind))
    return out


def _solve_exact(rows, unknowns: int):
    """Solution of an exact rational linear system, or None.

    Gauss-Jordan over the rationals; underdetermined free variables are
    set to zero, inconsistency returns None.
    """
    mat = [list(row) for row in rows]
    where = [-1] * unknowns
    row = 0
    for col in range(unknowns):
        pivot = next((r for r in range(row, len(mat)) if mat[r][col]), None)
        if pivot is None:
            continue
        mat[row], mat[pivot] = mat[pivot], mat[row]
        inv = 1 / Q(mat[row][col])
        mat[row] = [v * inv for v in mat[row]]
        for r in range(len(mat)):
            if r != row and mat[r][col]:
                factor = mat[r][col]
                mat[r] = [v - factor * w for v, w in zip(mat[r], mat[row])]
        where[col] = row
        row += 1
    for r in range(row, len(mat)):
        if mat[r][unknowns]:
            return None
    return [mat[where[c]][unknowns] if where[c] >= 0 else Q(0) for c in range(unknowns)]


def fit_linear_recurrence(seq, max_order: int | None = None):
    """Minimal-order exact linear recurrence of an integer sequence.

    Returns (order, coefficients) with s(n+order) = sum of
    coefficients[j] * s(n+j), or None when no recurrence of order up to
    the cap fits; the cap keeps at least order+1 equations in play, so
    a reported fit is confirmed on every window of the input.
    """
    vals = [Q(v) for v in seq]
    n = len(vals)
    cap = (n - 1) // 2
    if max_order is not None:
        cap = min(cap, max_order)
    for order in range(1, cap + 1):
        rows = [vals[i : i + order] + [vals[i + order]] for i in range(n - order)]
        sol = _solve_exact(rows, order)
        if sol is not None:
            return order, tuple(sol)
    return None
