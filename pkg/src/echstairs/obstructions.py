"""Obstructive classes and the exceptional-sphere side of the embedding problem.

A class (d; m~_1..m~_N, m_1,...) pairs a degree d with multiplicities
against the negative weights of the target domain and the ball weights
of the source ellipsoid E(1, a).  Only tuples satisfying the two
Diophantine conditions

    sum(m~) + sum(m) = 3d - 1        and
    sum(m~^2) + sum(m^2) = d^2 + 1

can carry an obstruction, and each such tuple defines the piecewise
linear function mu(a) = sum(m_j a_j) / (d b - sum(m~_i b_i)).  The
embedding function c_X(a) is the larger of the volume curve
sqrt(a/vol) and the supremum of the mu over all classes; a class whose
mu exceeds the volume curve at a is said to be obstructive there.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction as Q
from math import ceil, floor, isqrt

from .core import (
    InternalCheckError,
    NegativeWeightExpansion,
    parse_expansion,
    surd_sqrt,
    weight_expansion,
)

__all__ = [
    "CapacityCertificate",
    "ObstructiveClass",
    "dbound_squared",
    "enumerate_classes",
    "exact_c_at",
    "mu",
    "singular_point_of",
]


def _target(X) -> NegativeWeightExpansion:
    if isinstance(X, NegativeWeightExpansion):
        return X
    return parse_expansion(str(X))


@dataclass(frozen=True)
class ObstructiveClass:
    """Degree d with the two ordered multiplicity blocks (m~; m).

    Both blocks are stored nonincreasing (the ordered arrangement
    maximizes the obstruction against the sorted weight vectors) and m
    is kept without trailing zeros; conceptually it is padded with
    zeros to any length.
    """

    d: int
    m_tilde: tuple[int, ...] = ()
    m: tuple[int, ...] = ()

    def __post_init__(self):
        tilde = tuple(int(v) for v in self.m_tilde)
        body = tuple(int(v) for v in self.m)
        while body and body[-1] == 0:
            body = body[:-1]
        if self.d < 1:
            raise ValueError("degree must be a positive integer")
        if any(v < 0 for v in tilde + body):
            raise ValueError("multiplicities must be nonnegative")
        for block in (tilde, body):
            if any(x < y for x, y in zip(block, block[1:])):
                raise ValueError("multiplicity blocks must be nonincreasing")
        if sum(tilde) + sum(body) != 3 * self.d - 1:
            raise ValueError("class fails the linear Diophantine condition")
        if sum(v * v for v in tilde + body) != self.d * self.d + 1:
            raise ValueError("class fails the quadratic Diophantine condition")
        object.__setattr__(self, "m_tilde", tilde)
        object.__setattr__(self, "m", body)

    @property
    def ell(self) -> int:
        """Number of nonzero entries of m (the class length)."""
        return len(self.m)

    def as_dict(self):
        return {"d": self.d, "m_tilde": list(self.m_tilde), "m": list(self.m)}

    def __str__(self):
        tilde = ",".join(str(v) for v in self.m_tilde) or "-"
        body = ",".join(str(v) for v in self.m) or "-"
        return f"({self.d}; {tilde}; {body})"


def _denominator(cls: ObstructiveClass, X: NegativeWeightExpansion) -> Q:
    if len(cls.m_tilde) > len(X.parts) and any(
        v for v in cls.m_tilde[len(X.parts) :]
    ):
        raise ValueError("class carries more negative weights than the target")
    return cls.d * X.b - sum(v * w for v, w in zip(cls.m_tilde, X.parts))


def mu(cls: ObstructiveClass, X, a) -> Q:
    """The obstruction function of the class at a, exactly.

    mu = sum(m_j a_j) / (d b - sum(m~_i b_i)) with (a_j) the weight
    expansion of a; a class whose denominator is nonpositive cannot
    obstruct this target and is rejected.
    """
    target = _target(X)
    den = _denominator(cls, target)
    if den <= 0:
        raise ValueError(f"class {cls} has nonpositive denominator for {target}")
    weights = weight_expansion(a)
    num = sum(v * w for v, w in zip(cls.m, weights))
    return Q(num, 1) / den


def _mu_at(cls: ObstructiveClass, den: Q, weights) -> Q:
    return sum(v * w for v, w in zip(cls.m, weights)) / den


def _body_blocks(total: int, square: int, cap: int, max_len: int | None):
    """Nonincreasing positive tuples with given sum and sum of squares.

    Two-sided prune: every entry is at least 1 and at most cap, so a
    feasible tail must satisfy total <= square <= cap * total.
    """
    if total == 0:
        if square == 0:
            yield ()
        return
    if square < total or square > cap * total:
        return
    if max_len is not None and max_len <= 0:
        return
    first = min(cap, total)
    while first * first > square:
        first -= 1
    for v in range(first, 0, -1):
        tail_len = None if max_len is None else max_len - 1
        for rest in _body_blocks(total - v, square - v * v, v, tail_len):
            yield (v,) + rest


def _tilde_blocks(slots: int, d: int):
    """Nonincreasing tuples of the fixed length with square sum <= d^2."""

    def rec(remaining, cap, square_left):
        if remaining == 0:
            yield ()
            return
        for v in range(min(cap, isqrt(square_left)), -1, -1):
            for rest in rec(remaining - 1, v, square_left - v * v):
                yield (v,) + rest

    yield from rec(slots, d, d * d)


def _classes_for_d(d: int, X: NegativeWeightExpansion, ell_cap: int | None):
    out = []
    slots = len(X.parts)
    for tilde in _tilde_blocks(slots, d):
        den = d * X.b - sum(v * w for v, w in zip(tilde, X.parts))
        if den <= 0:
            continue
        total = 3 * d - 1 - sum(tilde)
        square = d * d + 1 - sum(v * v for v in tilde)
        if total < 0 or square < 0:
            continue
        for body in _body_blocks(total, square, d, ell_cap):
            out.append(ObstructiveClass(d, tilde, body))
    return out


def enumerate_classes(X, d_max: int, a=None, workers: int | None = None):
    """All ordered classes with d <= d_max that can obstruct the target.

    Solutions of the two Diophantine conditions are found by bounded
    backtracking (entries never exceed d) and filtered by the positive
    denominator requirement.  When a query point `a` is supplied the
    list is cut down to the classes actually obstructive at a: the
    length lemma discards bodies longer than ell(a) during the search,
    and the volume-curve comparison (exact, by squaring) discards the
    rest.  Enumeration partitions by degree; the classes are immutable,
    so the per-degree batches can run on a thread pool.
    """
    target = _target(X)
    if d_max < 1:
        return []
    ell_cap = None
    weights = None
    if a is not None:
        weights = weight_expansion(a)
        ell_cap = len(weights)
    degrees = range(1, d_max + 1)
    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            batches = list(
                pool.map(lambda d: _classes_for_d(d, target, ell_cap), degrees)
            )
    else:
        batches = [_classes_for_d(d, target, ell_cap) for d in degrees]
    found = [cls for batch in batches for cls in batch]
    if a is None:
        return found
    vol = target.vol
    a = Q(a)
    keep = []
    for cls in found:
        den = _denominator(cls, target)
        value = _mu_at(cls, den, weights)
        if value > 0 and value * value * vol > a:
            keep.append(cls)
    return keep


def dbound_squared(X, d: int, a) -> Q | None:
    """Square of the degree-d ceiling on any obstruction at a.

    mu^2 <= a (d^2+1) / (b^2 d^2 - (d^2+1) sum(b_i^2)), valid whenever
    the denominator is positive; None when the bound is undefined at
    this degree.  The bound decreases toward a/vol as d grows, which is
    what makes a finite enumeration conclusive: once the best value
    found reaches the ceiling of the next degree, no deeper class can
    beat it.
    """
    target = _target(X)
    square_parts = sum(p * p for p in target.parts)
    den = target.b * target.b * d * d - (d * d + 1) * square_parts
    if den <= 0:
        return None
    return Q(a) * (d * d + 1) / den


@dataclass(frozen=True)
class CapacityCertificate:
    """What backs a value returned by exact_c_at.

    kind is "class" or "volume"; winner is the optimal class when one
    beats the volume curve.  exact reports whether the d_max+1 tail
    bound already falls below the value, in which case the value is
    c_X(a) itself and not merely a certified lower bound.
    """

    kind: str
    winner: ObstructiveClass | None
    d_max: int
    exact: bool

    def as_dict(self):
        return {
            "kind": self.kind,
            "class": None if self.winner is None else self.winner.as_dict(),
            "d_max": self.d_max,
            "exact": self.exact,
        }


def exact_c_at(X, a, d_max: int):
    """Best certified value of the embedding function at a.

    Returns (value, certificate): the maximum of the volume curve and
    every obstruction with degree up to d_max.  The value is always a
    certified lower bound for c_X(a); the certificate says whether the
    degree cutoff provably dominates the remaining tail.
    """
    target = _target(X)
    a = Q(a)
    if a < 1:
        raise ValueError("the embedding function is evaluated at a >= 1")
    vol = target.vol
    weights = weight_expansion(a)
    best: Q | None = None
    winner = None
    for cls in enumerate_classes(target, d_max, a=a):
        value = _mu_at(cls, _denominator(cls, target), weights)
        if best is None or value > best:
            best, winner = value, cls
    if best is None:
        root = surd_sqrt(a / vol)
        if root is None:
            raise InternalCheckError(f"sqrt({a}/{vol}) escaped its field")
        return root, CapacityCertificate("volume", None, d_max, False)
    tail = dbound_squared(target, d_max + 1, a)
    exact = tail is not None and best * best >= tail
    return best, CapacityCertificate("class", winner, d_max, exact)


def singular_point_of(cls: ObstructiveClass, X, interval, q_max: int | None = None):
    """The unique kink of an obstruction inside an interval, if visible.

    On a maximal interval where mu exceeds the volume curve the
    obstruction has exactly one non-differentiable point, located at an
    a with ell(a) = ell(m).  The search scans rationals p/q over the
    interval with q bounded (default 10 * ell(m)) and returns the one
    obstructive point of matching length, or None when the interval
    shows none within the bound.
    """
    target = _target(X)
    lo, hi = Q(interval[0]), Q(interval[1])
    if lo > hi:
        raise ValueError("empty interval")
    bound = 10 * max(cls.ell, 1) if q_max is None else q_max
    den = _denominator(cls, target)
    if den <= 0:
        raise ValueError(f"class {cls} has nonpositive denominator for {target}")
    vol = target.vol
    hits = []
    for q in range(1, bound + 1):
        p_lo = ceil(lo * q)
        p_hi = floor(hi * q)
        for p in range(max(p_lo, q), p_hi + 1):
            a = Q(p, q)
            if a.denominator != q:
                continue  # not in lowest terms; already scanned
            weights = weight_expansion(a)
            if len(weights) != cls.ell:
                continue
            value = _mu_at(cls, den, weights)
            if value > 0 and value * value * vol > a:
                hits.append(a)
    if not hits:
        return None
    if len(hits) > 1:
        raise InternalCheckError(
            f"obstruction {cls} shows {len(hits)} kinks in [{lo}, {hi}]"
        )
    return hits[0]
