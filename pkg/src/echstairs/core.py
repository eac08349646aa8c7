"""Exact arithmetic foundations.

Rational numbers are `fractions.Fraction` throughout, elements of real
quadratic fields are `QuadraticSurd`, and nothing in this module rounds
through floating point.  On top of the field arithmetic it provides the
two weight expansions used everywhere else: the (positive) weight
sequence of an ellipsoid and the negative weight expansion of a convex
domain in the first quadrant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

from ._geom import normalize_polygon, polygon_area2

Q = Fraction


class UnsupportedShapeError(ValueError):
    """The region is outside the class this library handles."""


class FieldMixError(ValueError):
    """Surds from different quadratic fields were combined."""


class CertificationError(RuntimeError):
    """A computation could not certify the requested prefix.

    `achieved` holds the certified length that was reached before
    giving up, when one is available.
    """

    def __init__(self, message: str, achieved: int | None = None):
        super().__init__(message)
        self.achieved = achieved


class InternalCheckError(RuntimeError):
    """An internal consistency check failed; this indicates a bug."""


def _squarefree_split(n: int) -> tuple[int, int]:
    """Write n = s*s*d with d squarefree; return (s, d).  n > 0."""
    if n <= 0:
        raise ValueError("need a positive integer")
    s, d = 1, 1
    m = n
    f = 2
    while f * f <= m:
        if m % f == 0:
            e = 0
            while m % f == 0:
                m //= f
                e += 1
            s *= f ** (e // 2)
            if e % 2:
                d *= f
        f += 1 if f == 2 else 2
    return s, d * m


@dataclass(frozen=True, eq=False)
class QuadraticSurd:
    """(p + q*sqrt(D)) / r with integers p, q, r and squarefree D >= 0.

    Canonical form is maintained by construction: r > 0, the triple
    (p, q, r) has no common factor, D is squarefree, and q == 0 forces
    D == 0.  Rationals are exactly the q == 0 elements, so arithmetic
    with ints and Fractions stays inside the class.  Mixing two
    irrational surds from different fields raises FieldMixError.
    """

    p: int
    q: int
    D: int
    r: int = 1

    def __post_init__(self):
        p, q, D, r = self.p, self.q, self.D, self.r
        for name, v in (("p", p), ("q", q), ("D", D), ("r", r)):
            if not isinstance(v, int):
                raise TypeError(f"{name} must be an int, got {type(v).__name__}")
        if r == 0:
            raise ZeroDivisionError("zero denominator in surd")
        if D < 0:
            raise ValueError("negative discriminant is outside the real field")
        if q == 0:
            D = 0
        elif D == 0:
            q = 0
        else:
            s, d = _squarefree_split(D)
            q, D = q * s, d
            if D == 1:
                p, q, D = p + q, 0, 0
        if r < 0:
            p, q, r = -p, -q, -r
        g = gcd(gcd(abs(p), abs(q)), r)
        if g > 1:
            p, q, r = p // g, q // g, r // g
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "r", r)

    # -- construction helpers ------------------------------------------

    @classmethod
    def from_rational(cls, x) -> "QuadraticSurd":
        x = Q(x)
        return cls(x.numerator, 0, 0, x.denominator)

    @property
    def is_rational(self) -> bool:
        return self.q == 0

    def as_fraction(self) -> Q:
        if self.q != 0:
            raise ValueError(f"{self} is irrational")
        return Q(self.p, self.r)

    def conjugate(self) -> "QuadraticSurd":
        return QuadraticSurd(self.p, -self.q, self.D, self.r)

    # -- field arithmetic ----------------------------------------------

    def _common_D(self, other: "QuadraticSurd") -> int:
        if self.q and other.q and self.D != other.D:
            raise FieldMixError(
                f"cannot combine sqrt({self.D}) with sqrt({other.D})"
            )
        return self.D if self.q else other.D

    def __add__(self, other):
        o = _as_surd(other)
        if o is None:
            return NotImplemented
        D = self._common_D(o)
        return QuadraticSurd(
            self.p * o.r + o.p * self.r, self.q * o.r + o.q * self.r, D, self.r * o.r
        )

    __radd__ = __add__

    def __neg__(self):
        return QuadraticSurd(-self.p, -self.q, self.D, self.r)

    def __sub__(self, other):
        o = _as_surd(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = _as_surd(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = _as_surd(other)
        if o is None:
            return NotImplemented
        D = self._common_D(o)
        return QuadraticSurd(
            self.p * o.p + self.q * o.q * D,
            self.p * o.q + self.q * o.p,
            D,
            self.r * o.r,
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadraticSurd":
        n = self.p * self.p - self.q * self.q * self.D
        if n == 0:
            raise ZeroDivisionError("inverse of zero surd")
        return QuadraticSurd(self.p * self.r, -self.q * self.r, self.D, n)

    def __truediv__(self, other):
        o = _as_surd(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = _as_surd(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        out = QuadraticSurd(1, 0, 0, 1)
        base = self
        e = exponent
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __abs__(self):
        return -self if self._sign() < 0 else self

    # -- order ----------------------------------------------------------

    def _sign(self) -> int:
        p, q = self.p, self.q
        if q == 0:
            return (p > 0) - (p < 0)
        if p == 0:
            return (q > 0) - (q < 0)
        if (p > 0) == (q > 0):
            return 1 if p > 0 else -1
        lhs, rhs = p * p, q * q * self.D
        if lhs > rhs:
            return 1 if p > 0 else -1
        return 1 if q > 0 else -1

    def _cmp(self, other) -> int | None:
        o = _as_surd(other)
        if o is None:
            return None
        return (self - o)._sign()

    def __eq__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c == 0

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c >= 0

    def __hash__(self):
        if self.q == 0:
            return hash(Q(self.p, self.r))
        return hash((self.p, self.q, self.D, self.r))

    def __bool__(self):
        return self.p != 0 or self.q != 0

    # -- exact integer/decimal views -------------------------------------

    def floor(self) -> int:
        """Exact floor.  Uses isqrt; never touches floats."""
        if self.q == 0:
            return self.p // self.r
        m = isqrt(self.q * self.q * self.D)
        num = self.p + m if self.q > 0 else self.p - m - 1
        return num // self.r

    def decimal_str(self, digits: int = 20) -> str:
        """Correctly rounded decimal with `digits` significant digits."""
        if digits < 1:
            raise ValueError("need at least one digit")
        sgn = self._sign()
        if sgn == 0:
            return "0"
        y = -self if sgn < 0 else self
        f = y.floor()
        if f > 0:
            e = len(str(f)) - 1
        else:
            e = -1
            z = y * 10
            while z.floor() == 0:
                z = z * 10
                e -= 1
        shift = digits - 1 - e
        scaled = y * Q(10) ** shift if shift >= 0 else y / Q(10) ** (-shift)
        n = (scaled + Q(1, 2)).floor()
        s = str(n)
        if len(s) > digits:
            s = s[:digits]
            e += 1
        if e >= 0:
            if e + 1 >= len(s):
                body = s + "0" * (e + 1 - len(s))
            else:
                body = s[: e + 1] + "." + s[e + 1 :]
        else:
            body = "0." + "0" * (-e - 1) + s
        return "-" + body if sgn < 0 else body

    def __float__(self):
        return float(Q(self.p, self.r)) + float(Q(self.q, self.r)) * math.sqrt(self.D)

    def convergents(self, count: int) -> list[Q]:
        """First `count` continued fraction convergents (fewer if rational)."""
        out: list[Q] = []
        h1, h0 = 1, 0
        k1, k0 = 0, 1
        x = self
        for _ in range(count):
            a = x.floor()
            h1, h0 = a * h1 + h0, h1
            k1, k0 = a * k1 + k0, k1
            out.append(Q(h1, k1))
            frac = x - a
            if frac._sign() == 0:
                break
            x = frac.inverse()
        return out

    def __str__(self):
        if self.q == 0:
            return str(Q(self.p, self.r))
        root = f"sqrt({self.D})" if abs(self.q) == 1 else f"{abs(self.q)}*sqrt({self.D})"
        if self.p == 0:
            body = root if self.q > 0 else f"-{root}"
        else:
            body = f"{self.p}{'+' if self.q > 0 else '-'}{root}"
        if self.r == 1:
            return body
        return f"({body})/{self.r}"

    def __repr__(self):
        return f"QuadraticSurd({self.p}, {self.q}, {self.D}, {self.r})"


def _as_surd(x) -> QuadraticSurd | None:
    if isinstance(x, QuadraticSurd):
        return x
    if isinstance(x, int):
        return QuadraticSurd(x, 0, 0, 1)
    if isinstance(x, Fraction):
        return QuadraticSurd(x.numerator, 0, 0, x.denominator)
    return None


def surd_sqrt(x) -> QuadraticSurd | None:
    """Exact square root of x >= 0 as a QuadraticSurd, else None.

    A positive rational a/b always has the representation sqrt(a*b)/b.
    An irrational surd has a square root inside its own field only
    sometimes; when the norm equations have no integer solution the
    function returns None (the value then lives in a degree-4 field).
    Negative input also returns None.
    """
    s = _as_surd(x)
    if s is None:
        raise TypeError(f"cannot take surd square root of {type(x).__name__}")
    sign = s._sign()
    if sign < 0:
        return None
    if sign == 0:
        return QuadraticSurd(0, 0, 0, 1)
    if s.q == 0:
        return QuadraticSurd(0, 1, s.p * s.r, s.r)
    for w in (s.r, 2 * s.r):
        m_num = s.p * w * w
        n_num = s.q * w * w
        if m_num % s.r or n_num % (2 * s.r):
            continue
        M = m_num // s.r
        N = n_num // (2 * s.r)
        disc = M * M - 4 * N * N * s.D
        if disc < 0:
            continue
        root = isqrt(disc)
        if root * root != disc:
            continue
        for twice_x2 in (M + root, M - root):
            if twice_x2 % 2:
                continue
            x2 = twice_x2 // 2
            xv = isqrt(x2)
            if xv * xv != x2 or xv == 0 or N % xv:
                continue
            cand = QuadraticSurd(xv, N // xv, s.D, w)
            if cand * cand == s:
                return cand if cand._sign() > 0 else -cand
    return None


def solve_accumulation_quadratic(K) -> QuadraticSurd | None:
    """Larger root of z*z - K*z + 1 = 0, or None when the roots are complex.

    The discriminant K*K - 4 is negative exactly when |K| < 2; at K = 2
    the double root 1 comes back as a rational-valued surd.
    """
    K = Q(K)
    p, q = K.numerator, K.denominator
    disc = p * p - 4 * q * q
    if disc < 0:
        return None
    return QuadraticSurd(p, 1, disc, 2 * q)


# ---------------------------------------------------------------------------
# weight expansions
# ---------------------------------------------------------------------------


def weight_expansion(a) -> tuple[Q, ...]:
    """Ball weights of the ellipsoid E(1, a), for rational a >= 1.

    The greedy rectangle subdivision: repeatedly cut the largest square
    off an a-by-1 rectangle and record its side.  For a = p/q in lowest
    terms the sequence ends at 1/q, sums to a + 1 - 1/q, and has sum of
    squares a.
    """
    a = Q(a)
    if a < 1:
        raise ValueError("weight expansion is defined for a >= 1")
    out: list[Q] = []
    long_side, short_side = a, Q(1)
    while short_side > 0:
        k = long_side // short_side
        out.extend([short_side] * k)
        long_side, short_side = short_side, long_side - k * short_side
    return tuple(out)


@dataclass(frozen=True)
class NegativeWeightExpansion:
    """Ball-subtraction presentation (b; b_1, ..., b_n) of a domain.

    The head weight b is the size of the enclosing right simplex and
    the parts are the corner gaps, sorted nonincreasing.  per and vol
    are the normalized perimeter 3b - sum(b_i) and area surplus
    b^2 - sum(b_i^2); K is the associated quadratic trace per^2/vol - 2.
    """

    b: Q
    parts: tuple[Q, ...] = ()

    def __post_init__(self):
        b = Q(self.b)
        parts = tuple(sorted((Q(p) for p in self.parts), reverse=True))
        if b <= 0:
            raise ValueError("head weight must be positive")
        if parts and parts[-1] <= 0:
            raise ValueError("parts must be positive")
        if parts and parts[0] >= b:
            raise ValueError("parts must be smaller than the head weight")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "parts", parts)
        if self.vol <= 0:
            raise ValueError("expansion has nonpositive volume")

    @property
    def per(self) -> Q:
        return 3 * self.b - sum(self.parts)

    @property
    def vol(self) -> Q:
        return self.b * self.b - sum(p * p for p in self.parts)

    @property
    def K(self) -> Q:
        return self.per * self.per / self.vol - 2

    def scale(self, factor) -> "NegativeWeightExpansion":
        factor = Q(factor)
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        return NegativeWeightExpansion(
            self.b * factor, tuple(p * factor for p in self.parts)
        )

    def __str__(self):
        if not self.parts:
            return f"({self.b})"
        return f"({self.b};{','.join(str(p) for p in self.parts)})"


def parse_expansion(text: str) -> NegativeWeightExpansion:
    """Parse "(4;2,2)", "4;2,2" or plain "3" into an expansion."""
    s = text.strip()
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    head, _, rest = s.partition(";")
    try:
        b = Q(head.strip())
        parts = tuple(Q(t.strip()) for t in rest.split(",") if t.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse expansion {text!r}: {exc}") from None
    return NegativeWeightExpansion(b, parts)


def _chain_weights(chain: list[tuple[int, int]]) -> list[int]:
    """Weights of the gap between a monotone lattice chain and its axes.

    The chain runs from (s, 0) to (0, t) with every edge stepping left
    and up, convexly.  The gap is chopped by the largest corner simplex
    (side: the minimum of s + t over the chain), and what remains splits
    into two smaller gaps in unimodular normal position.
    """
    total: list[int] = []
    stack = [chain]
    while stack:
        raw = stack.pop()
        ch: list[tuple[int, int]] = []
        for v in raw:
            if not ch or v != ch[-1]:
                ch.append(v)
        if len(ch) < 2:
            continue
        if ch[0][1] != 0 or ch[-1][0] != 0:
            raise InternalCheckError("corner chain does not span its axes")
        edges = [(ch[i + 1][0] - ch[i][0], ch[i + 1][1] - ch[i][1]) for i in range(len(ch) - 1)]
        for ds, dt in edges:
            if ds > 0 or dt < 0:
                raise InternalCheckError("corner chain is not monotone")
        for (a1, b1), (a2, b2) in zip(edges, edges[1:]):
            if a1 * b2 - b1 * a2 > 0:
                raise InternalCheckError("corner chain is not convex")
        vals = [s + t for s, t in ch]
        c = min(vals)
        if c == 0:
            continue
        total.append(c)
        first = vals.index(c)
        last = len(vals) - 1 - vals[::-1].index(c)
        stack.append([(s + t - c, t) for s, t in ch[: first + 1]])
        stack.append([(s, s + t - c) for s, t in ch[last:]])
    return total


def _walk(pts: list, i: int, j: int) -> list:
    out = [pts[i]]
    k = i
    while k != j:
        k = (k + 1) % len(pts)
        out.append(pts[k])
    return out


def negative_weight_expansion(vertices) -> NegativeWeightExpansion:
    """Negative weight expansion of a convex region touching both axes.

    The region is enclosed in the right simplex of size b = max(x + y);
    the complement decomposes into corner gaps at the right corner, the
    top corner and (when the region misses it) the origin, each of which
    unwinds into a weight sequence by repeated simplex chopping.
    """
    try:
        poly = normalize_polygon(vertices)
    except ValueError as exc:
        raise UnsupportedShapeError(str(exc)) from None
    if any(x < 0 or y < 0 for x, y in poly):
        raise UnsupportedShapeError("region must lie in the first quadrant")
    if not any(y == 0 for _, y in poly):
        raise UnsupportedShapeError("region must touch the x axis")
    if not any(x == 0 for x, _ in poly):
        raise UnsupportedShapeError("region must touch the y axis")

    lam = 1
    for x, y in poly:
        lam = lam * x.denominator // gcd(lam, x.denominator)
        lam = lam * y.denominator // gcd(lam, y.denominator)
    pts = [(int(x * lam), int(y * lam)) for x, y in poly]
    n = len(pts)
    b = max(x + y for x, y in pts)

    hyp = [i for i, (x, y) in enumerate(pts) if x + y == b]
    if len(hyp) == 1:
        h_first = h_last = hyp[0]
    elif len(hyp) == 2 and (hyp[0] + 1) % n == hyp[1]:
        h_first, h_last = hyp
    elif len(hyp) == 2 and (hyp[1] + 1) % n == hyp[0]:
        h_first, h_last = hyp[1], hyp[0]
    else:
        raise InternalCheckError("diagonal support set is not a face")

    on_x = [i for i, (x, y) in enumerate(pts) if y == 0]
    on_y = [i for i, (x, y) in enumerate(pts) if x == 0]
    i_xhi = max(on_x, key=lambda i: pts[i][0])
    i_xlo = min(on_x, key=lambda i: pts[i][0])
    i_ytop = max(on_y, key=lambda i: pts[i][1])
    i_ylo = min(on_y, key=lambda i: pts[i][1])

    right = [(b - x - y, y) for x, y in _walk(pts, i_xhi, h_first)]
    top = [(b - x - y, x) for x, y in _walk(pts, h_last, i_ytop)]
    top.reverse()
    origin = list(reversed(_walk(pts, i_ylo, i_xlo)))

    weights: list[int] = []
    for chain in (right, top, origin):
        weights.extend(_chain_weights(chain))

    exp = NegativeWeightExpansion(
        Q(b, lam), tuple(Q(w, lam) for w in weights)
    )
    if exp.vol != polygon_area2(poly):
        raise InternalCheckError("weights do not account for the region's area")
    return exp
