"""Recurrence data and staircase geometry for the six accumulating families.

Each family runs on a linear recurrence g(n + 2J) = K*g(n + J) - g(n)
whose ratios g(n+J)/g(n) climb to the accumulation point a0.  The
registry below carries every constant the rest of the package needs
(identity coefficients, sign tables, lattice-path offsets) together
with a checksum that re-derives K from the weight expansion, so a
mistranscribed constant cannot drift through silently.
"""

from __future__ import annotations

import threading
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction as Q
from math import lcm

from .capacities import count_below
from .core import (
    InternalCheckError,
    QuadraticSurd,
    parse_expansion,
    solve_accumulation_quadratic,
)

__all__ = [
    "FAMILIES",
    "Corner",
    "RecurrenceFamily",
    "StaircaseGraph",
    "corners",
    "family",
    "g",
    "staircase_graph",
    "verify_identities",
    "verify_outer_obstruction",
    "verify_structure",
]


def _at(row: tuple[int, ...], n: int) -> int:
    return row[n % len(row)]


@dataclass(frozen=True)
class RecurrenceFamily:
    """Constant registry for one staircase family.

    Residue-indexed tables are stored as tuples cycled by ``n mod len``:
    ``beta`` and ``sigma`` drive the three-term identities, ``clubs``
    holds the J=3 coefficient pairs (p, q) in
    g(n) + g(n+3) = p*g(n+1) + q*g(n+2), and ``c_row``/``d_row``/
    ``e_row`` are the offsets appearing in the lattice-path counts
    s_n, t_n and the path length.  ``head``, ``part`` and ``copies``
    spell out the weight expansion (head; part, ..., part).
    """

    name: str
    K: int
    J: int
    seeds: tuple[int, ...]
    alpha: int | None
    beta: tuple[int, ...]
    delta: tuple[int, ...] | None
    mu: tuple[int, ...] | None
    sigma: tuple[int, ...]
    clubs: tuple[tuple[int, int], ...] | None
    head: int
    part: int
    copies: int
    c_row: tuple[int, ...]
    d_row: tuple[int, ...] | None
    e_row: tuple[int, ...]

    def __post_init__(self):
        self._checksum()

    @property
    def per(self) -> int:
        return 3 * self.head - self.copies * self.part

    @property
    def vol(self) -> int:
        return self.head * self.head - self.copies * self.part * self.part

    @property
    def a0(self) -> QuadraticSurd:
        root = solve_accumulation_quadratic(self.K)
        assert root is not None
        return root

    @property
    def y_limit(self) -> QuadraticSurd:
        # sqrt(a0/vol), rationalized: (K + 2 + sqrt(K^2 - 4)) / (2K + 4).
        return QuadraticSurd(self.K + 2, 1, self.K * self.K - 4, 2 * self.K + 4)

    def beta_at(self, n: int) -> int:
        return _at(self.beta, n)

    def delta_at(self, n: int) -> int:
        assert self.delta is not None
        return _at(self.delta, n)

    def mu_at(self, n: int) -> int:
        assert self.mu is not None
        return _at(self.mu, n)

    def sigma_at(self, n: int) -> int:
        return _at(self.sigma, n)

    def c_at(self, n: int) -> int:
        return _at(self.c_row, n)

    def d_at(self, n: int) -> int:
        return _at(self.d_row, n) if self.d_row is not None else 0

    def e_at(self, n: int) -> int:
        return _at(self.e_row, n)

    def _checksum(self) -> None:
        """Re-derive the audited invariants from the expansion itself."""
        if len(self.seeds) != 2 * self.J:
            raise InternalCheckError(f"{self.name}: expected {2 * self.J} seeds")
        exp = parse_expansion(self.name)
        if exp.b != self.head or exp.parts != (Q(self.part),) * self.copies:
            raise InternalCheckError(f"{self.name}: expansion fields disagree")
        if self.per != exp.per or self.vol != exp.vol or self.per != self.vol:
            raise InternalCheckError(f"{self.name}: per/vol mismatch")
        if Q(self.per * self.per, self.vol) - 2 != self.K:
            raise InternalCheckError(f"{self.name}: K != per^2/vol - 2")
        if self.vol != self.K + 2:
            raise InternalCheckError(f"{self.name}: vol != K + 2")
        if self.y_limit * self.y_limit * self.vol != self.a0:
            raise InternalCheckError(f"{self.name}: y-limit fails y^2 vol = a0")
        rows = [self.c_row, self.e_row] + ([self.d_row] if self.d_row else [])
        for n in range(lcm(*(len(r) for r in rows))):
            kb = self.copies * self.part
            if self.head * self.c_at(n) - kb * self.d_at(n) + self.vol * self.e_at(n):
                raise InternalCheckError(f"{self.name}: offset row identity fails at {n}")


FAMILIES: dict[str, RecurrenceFamily] = {
    fam.name: fam
    for fam in (
        RecurrenceFamily(
            name="(3)",
            K=7,
            J=2,
            seeds=(2, 1, 1, 2),
            alpha=3,
            beta=(3,),
            delta=None,
            mu=None,
            sigma=(1,),
            clubs=None,
            head=3,
            part=0,
            copies=0,
            c_row=(0,),
            d_row=None,
            e_row=(0,),
        ),
        RecurrenceFamily(
            name="(4;2,2)",
            K=6,
            J=2,
            seeds=(1, 1, 1, 3),
            alpha=2,
            beta=(4, 2),
            delta=None,
            mu=None,
            sigma=(2, 1),
            clubs=None,
            head=4,
            part=2,
            copies=2,
            c_row=(0,),
            d_row=(4, 0),
            e_row=(2, 0),
        ),
        RecurrenceFamily(
            name="(3;1,1,1)",
            K=4,
            J=2,
            seeds=(1, 1, 1, 2),
            alpha=1,
            beta=(3, 2),
            delta=None,
            mu=None,
            sigma=(3, 2),
            clubs=None,
            head=3,
            part=1,
            copies=3,
            c_row=(0, 3, 0, -3),
            d_row=(-2, 3, 2, -3),
            e_row=(-1, 0, 1, 0),
        ),
        RecurrenceFamily(
            name="(3;1,1,1,1)",
            K=3,
            J=2,
            seeds=(1, 2, 1, 3),
            alpha=1,
            beta=(5, 1),
            delta=None,
            mu=None,
            sigma=(5, 1),
            clubs=None,
            head=3,
            part=1,
            copies=4,
            c_row=(4, 0, -4, 0),
            d_row=(3, 0, -3, 0),
            e_row=(0,),
        ),
        RecurrenceFamily(
            name="(3;1)",
            K=6,
            J=3,
            seeds=(1, 1, 1, 1, 2, 4),
            alpha=None,
            beta=(7, 4, 7),
            delta=(1, 2, 1),
            mu=(3,),
            sigma=(1,),
            clubs=((1, 1), (2, 1), (1, 2)),
            head=3,
            part=1,
            copies=1,
            c_row=(2, -1, 1, -2, 1, -1),
            d_row=(6, -3, 3, -6, 3, -3),
            e_row=(0,),
        ),
        RecurrenceFamily(
            name="(3;1,1)",
            K=5,
            J=3,
            seeds=(1, 1, 1, 1, 2, 3),
            alpha=None,
            beta=(5, 3, 5),
            delta=(1,),
            mu=(2, 2, 3),
            sigma=(2, 1, 1),
            clubs=((1, 1), (1, 2), (2, 1)),
            head=3,
            part=1,
            copies=2,
            c_row=(1, -2, 2, -1, 2, -2),
            d_row=(5, -3, 3, 2, 3, -3),
            e_row=(1, 0, 0),
        ),
    )
}


def family(case) -> RecurrenceFamily:
    """Look up a family by expansion string, with or without parentheses."""
    if isinstance(case, RecurrenceFamily):
        return case
    key = str(parse_expansion(str(case)))
    try:
        return FAMILIES[key]
    except KeyError:
        known = ", ".join(sorted(FAMILIES))
        raise ValueError(f"no staircase family {key}; known families: {known}") from None


_TABLES: dict[str, list[int]] = {}
_TABLES_LOCK = threading.Lock()


def g(case, n: int) -> int:
    """The n-th recurrence value of the family, from the seed block."""
    fam = family(case)
    if n < 0:
        raise ValueError("recurrence index must be nonnegative")
    with _TABLES_LOCK:
        tab = _TABLES.setdefault(fam.name, list(fam.seeds))
        while len(tab) <= n:
            tab.append(fam.K * tab[-fam.J] - tab[-2 * fam.J])
        return tab[n]


def verify_identities(case, n_max: int) -> bool:
    """Exact check of the three-term identity suite for 0 <= n <= n_max.

    Covers the club/diamond/heart identities in both the J=2 and J=3
    forms, the auxiliary facts beta_n * beta_{n+1} = vol and
    sigma_{n+1} g(n+1) g(n+3) - sigma_{n+2} g(n+2)^2 = 1 (J=2), and the
    offset-row identity head*c_n - k*part*d_n + vol*e_n = 0.
    """
    fam = family(case)
    K = fam.K
    kb = fam.copies * fam.part
    for n in range(n_max + 1):
        if fam.head * fam.c_at(n) - kb * fam.d_at(n) + fam.vol * fam.e_at(n):
            return False
        if fam.J == 2:
            g0, g1, g2, g3 = (g(fam, n + i) for i in range(4))
            assert fam.alpha is not None
            if g0 + g2 != fam.beta_at(n + 1) * g1:
                return False
            if g0 * g0 + g2 * g2 - K * g0 * g2 != -fam.alpha * fam.beta_at(n + 1):
                return False
            if g0 * g3 != g1 * g2 + fam.alpha:
                return False
            if fam.beta_at(n) * fam.beta_at(n + 1) != fam.vol:
                return False
            if fam.sigma_at(n + 1) * g1 * g3 - fam.sigma_at(n + 2) * g2 * g2 != 1:
                return False
        else:
            g0, g1, g2, g3, g4, g5 = (g(fam, n + i) for i in range(6))
            assert fam.clubs is not None
            p, q = fam.clubs[n % 3]
            if g0 + g3 != p * g1 + q * g2:
                return False
            if g0 * g0 + g3 * g3 - K * g0 * g3 != -fam.beta_at(n + 1):
                return False
            if g0 * g4 != g1 * g3 + fam.delta_at(n):
                return False
            if g0 * g5 != g2 * g3 + fam.mu_at(n):
                return False
    return True


@dataclass(frozen=True)
class Corner:
    """One staircase corner; inner corners touch the graph from below."""

    x: Q
    y: Q
    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in ("inner", "outer"):
            raise ValueError("corner kind must be 'inner' or 'outer'")
        if not 0 < self.y < 1:
            raise InternalCheckError(f"corner ordinate {self.y} out of range")


def corners(case, n: int) -> tuple[Corner, Corner]:
    """Exact (inner, outer) corner pair at index n.

    The outer corner sits at x = g(n+J)/g(n) and the inner corner at
    x = g(n+J)(g(n+1) + g(n+1+J)) / ((g(n) + g(n+J)) g(n+1)); the two
    share the ordinate g(n+J)/(g(n) + g(n+J)).  The outer corner of
    index 0 can fall left of x = 1 (it does for (3)), in which case the
    graph starts at the inner corner instead.
    """
    fam = family(case)
    J = fam.J
    lo, hi = g(fam, n), g(fam, n + J)
    y = Q(hi, lo + hi)
    x_in = Q(hi * (g(fam, n + 1) + g(fam, n + 1 + J)), (lo + hi) * g(fam, n + 1))
    inner = Corner(x_in, y, "inner", n)
    outer = Corner(Q(hi, lo), y, "outer", n)
    return inner, outer


def verify_structure(case, n_max: int, eps) -> bool:
    """Interleaving and convergence of the corner sequence up to n_max.

    Checks x_out(n) < x_in(n) < x_out(n+1) exactly, that the distances
    |x_out(n) - a0| and |y_out(n) - sqrt(a0/vol)| shrink strictly and
    fall below eps at n_max, and (J=3) that every residue subsequence
    g(3m + j) satisfies the two-step recurrence with the same K.
    """
    fam = family(case)
    a0 = fam.a0
    y_inf = fam.y_limit
    tol = Q(eps)
    prev_dx = prev_dy = None
    for n in range(n_max + 1):
        inner, outer = corners(fam, n)
        if not outer.x < inner.x < corners(fam, n + 1)[1].x:
            return False
        dx = a0 - outer.x
        dy = y_inf - outer.y
        if not (dx > 0 and dy > 0):
            return False
        if prev_dx is not None and not (dx < prev_dx and dy < prev_dy):
            return False
        prev_dx, prev_dy = dx, dy
    if not (prev_dx < tol and prev_dy < tol):
        return False
    if fam.J == 3:
        for j in range(3):
            for m in range(n_max + 1):
                lhs = g(fam, 3 * (m + 2) + j)
                if lhs != fam.K * g(fam, 3 * (m + 1) + j) - g(fam, 3 * m + j):
                    return False
    return True


class StaircaseGraph:
    """The staircase as an exact piecewise-linear function on [1, a_max].

    Horizontal shelves run from each outer corner to the inner corner at
    the same height; between an inner corner and the next outer corner
    the graph follows the ray through the origin.  Corners are computed
    lazily: evaluating past the last stored corner extends the list,
    which stays finite because the query point sits strictly below a0.
    """

    def __init__(self, fam: RecurrenceFamily, a_max: Q, clipped: bool):
        self.family = fam
        self.a_max = a_max
        self.clipped = clipped
        inner, outer = corners(fam, 0)
        self._corners: list[Corner] = [outer] if outer.x >= 1 else []
        self._corners.append(inner)
        self._xs: list[Q] = [c.x for c in self._corners]
        self._next = 1

    @property
    def corner_list(self) -> tuple[Corner, ...]:
        return tuple(self._corners)

    def _extend_past(self, a: Q) -> None:
        while self._xs[-1] < a:
            inner, outer = corners(self.family, self._next)
            last = self._corners[-1]
            # Continuity audit: shelf at equal height, ray through origin.
            if last.y * outer.x != outer.y * last.x:
                raise InternalCheckError("outer corner misses the origin ray")
            if outer.y != inner.y:
                raise InternalCheckError("shelf endpoints differ in height")
            self._corners += [outer, inner]
            self._xs += [outer.x, inner.x]
            self._next += 1

    def value_at(self, a) -> Q:
        a = Q(a)
        if a < 1:
            raise ValueError("the staircase is defined for a >= 1")
        if a > self.a_max:
            raise ValueError(f"a = {a} beyond the requested bound {self.a_max}")
        if self.family.a0 <= a:
            raise ValueError("cannot evaluate at or past the accumulation point")
        self._extend_past(a)
        i = bisect_right(self._xs, a) - 1
        if i < 0:
            raise ValueError(f"a = {a} lies left of the first corner")
        here = self._corners[i]
        if here.x == a:
            return here.y
        if here.kind == "outer":
            return here.y
        return here.y * a / here.x

    __call__ = value_at


def staircase_graph(case, a_max, clip: bool = False) -> StaircaseGraph:
    """Build the staircase graph on [1, a_max]; a_max must stay below a0
    unless clip=True marks the bound as accumulation-clipped."""
    fam = family(case)
    bound = Q(a_max)
    if bound < 1:
        raise ValueError("a_max must be at least 1")
    if fam.a0 <= bound and not clip:
        raise ValueError(
            f"{fam.name} accumulates at a0 = {fam.a0}; pass clip=True to "
            "evaluate on [1, a0)"
        )
    return StaircaseGraph(fam, bound, clip)


def verify_outer_obstruction(case, n: int) -> bool:
    """Certify y_out(n) <= c_X(x_out(n)) combinatorially.

    Two exact facts combine: at most k_n = (g(n)+1)(g(n+J)+1)/2 - 1
    values m*g(n) + m'*g(n+J) fall strictly below g(n)g(n+J), and the
    witness path of index n has length g(n) + g(n+J) while enclosing
    k_n + 1 lattice points.
    """
    fam = family(case)
    lo, hi = g(fam, n), g(fam, n + fam.J)
    pairs = (lo + 1) * (hi + 1)
    if pairs % 2:
        raise InternalCheckError("corner index (g(n)+1)(g(n+J)+1)/2 not integral")
    k_n = pairs // 2 - 1
    if count_below(lo, hi, lo * hi) > k_n:
        return False
    from .latticepaths import verify_lambda

    return verify_lambda(fam.name, n)
