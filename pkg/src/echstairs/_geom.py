"""Shared exact plane geometry helpers.

All coordinates are `fractions.Fraction` (or int); nothing in here is
allowed to touch floating point.  Polygons are stored as tuples of
vertex pairs, ordered counterclockwise with collinear vertices removed.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Q = Fraction

Vec = tuple[Q, Q]


def cross(u: Sequence, v: Sequence):
    return u[0] * v[1] - u[1] * v[0]


def vsub(a: Sequence, b: Sequence) -> Vec:
    return (a[0] - b[0], a[1] - b[1])


def primitive(v: Sequence[int]) -> tuple[int, int]:
    """Primitive integer vector in the direction of v."""
    x, y = int(v[0]), int(v[1])
    if x == 0 and y == 0:
        raise ValueError("zero vector has no direction")
    g = gcd(abs(x), abs(y))
    return (x // g, y // g)


def normalize_polygon(vertices: Iterable[Sequence]) -> tuple[Vec, ...]:
    """Validate and canonicalize a convex polygon.

    Returns the vertices in counterclockwise order starting from the
    lexicographically smallest one, with collinear intermediate vertices
    dropped.  Raises ValueError if the input is not strictly convex.
    """
    verts = [(Q(p[0]), Q(p[1])) for p in vertices]
    if len(verts) < 3:
        raise ValueError("polygon needs at least 3 vertices")
    # drop consecutive duplicates (also across the wrap)
    dedup: list[Vec] = []
    for p in verts:
        if not dedup or p != dedup[-1]:
            dedup.append(p)
    if len(dedup) > 1 and dedup[0] == dedup[-1]:
        dedup.pop()
    verts = dedup
    if len(verts) < 3:
        raise ValueError("degenerate polygon")
    area2 = sum(cross(verts[i], verts[(i + 1) % len(verts)]) for i in range(len(verts)))
    if area2 == 0:
        raise ValueError("polygon has zero area")
    if area2 < 0:
        verts.reverse()
    # drop collinear middle vertices, then check strict convexity
    kept: list[Vec] = []
    n = len(verts)
    for i in range(n):
        a, b, c = verts[i - 1], verts[i], verts[(i + 1) % n]
        turn = cross(vsub(b, a), vsub(c, b))
        if turn < 0:
            raise ValueError("polygon is not convex")
        if turn > 0:
            kept.append(b)
    if len(kept) < 3:
        raise ValueError("degenerate polygon")
    start = min(range(len(kept)), key=lambda i: kept[i])
    return tuple(kept[start:] + kept[:start])


def polygon_area2(vertices: Sequence[Sequence]) -> Q:
    """Twice the (positive) area."""
    n = len(vertices)
    s = sum(cross(vertices[i], vertices[(i + 1) % n]) for i in range(n))
    return abs(s)


def boundary_lattice_count(vertices: Sequence[Sequence]) -> int:
    """Number of lattice points on the boundary of a lattice polygon."""
    total = 0
    n = len(vertices)
    for i in range(n):
        dx, dy = vsub(vertices[(i + 1) % n], vertices[i])
        if dx.denominator != 1 or dy.denominator != 1:
            raise ValueError("boundary count needs integer vertices")
        total += gcd(abs(int(dx)), abs(int(dy)))
    return total


def lattice_points_in(vertices: Sequence[Sequence]) -> int:
    """Total lattice points in a closed lattice polygon, via Pick."""
    a2 = polygon_area2(vertices)
    b = boundary_lattice_count(vertices)
    if a2.denominator != 1:
        raise ValueError("Pick count needs integer area doubling")
    # points = interior + boundary = (area - b/2 + 1) + b
    twice = int(a2) + b + 2
    assert twice % 2 == 0
    return twice // 2


def interior_lattice_count(vertices: Sequence[Sequence]) -> int:
    return lattice_points_in(vertices) - boundary_lattice_count(vertices)


def contains_point(vertices: Sequence[Sequence], p: Sequence) -> bool:
    """Closed containment test for a convex CCW polygon."""
    n = len(vertices)
    for i in range(n):
        edge = vsub(vertices[(i + 1) % n], vertices[i])
        if cross(edge, vsub(p, vertices[i])) < 0:
            return False
    return True


def support(vertices: Sequence[Sequence], nu: Sequence[int]) -> tuple[Q, Vec]:
    """max det[nu, p] over the polygon, with the lex-smallest maximizer."""
    best = None
    best_p = None
    for p in vertices:
        val = nu[0] * p[1] - nu[1] * p[0]
        if best is None or val > best or (val == best and p < best_p):
            best, best_p = val, p
    return best, best_p


def _bezout(u: tuple[int, int]) -> tuple[int, int]:
    """(a, b) with a*u0 + b*u1 = 1 for a primitive vector u."""
    x, y = u
    old_r, r = x, y
    old_a, a = 1, 0
    old_b, b = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_a, a = a, old_a - q * a
        old_b, b = b, old_b - q * b
    if old_r < 0:
        old_a, old_b = -old_a, -old_b
    return old_a, old_b


def edge_cycle_key(vertices: Sequence[Sequence]) -> tuple:
    """Canonical key of a lattice polygon under AGL(2, Z).

    For every rotation of the edge cycle, in both orientations, pin a
    unimodular frame sending the first edge direction to (1, 0), with
    the residual shear fixed by reducing the second edge's x-coordinate
    modulo its y-coordinate.  The key is the lexicographic minimum of
    the mapped cycles; two lattice polygons get equal keys exactly when
    an affine unimodular map carries one to the other.
    """
    n = len(vertices)
    edges = [vsub(vertices[(i + 1) % n], vertices[i]) for i in range(n)]
    ints = []
    for e in edges:
        if e[0].denominator != 1 or e[1].denominator != 1:
            raise ValueError("canonical key needs lattice vertices")
        ints.append((int(e[0]), int(e[1])))
    cycles = [tuple(ints), tuple((-x, -y) for (x, y) in reversed(ints))]
    best = None
    for cyc in cycles:
        for r in range(n):
            rot = cyc[r:] + cyc[:r]
            u0 = primitive(rot[0])
            a, b = _bezout(u0)
            c, d = -u0[1], u0[0]
            e2 = rot[1]
            x2 = a * e2[0] + b * e2[1]
            y2 = c * e2[0] + d * e2[1]
            if y2 < 0:
                # mirror orientation: flip to the det -1 frame
                c, d, y2 = -c, -d, -y2
            if y2 == 0:
                raise ValueError("canonical key needs strictly convex corners")
            k = -(x2 // y2)
            a, b = a + k * c, b + k * d
            mapped = tuple((a * e[0] + b * e[1], c * e[0] + d * e[1]) for e in rot)
            if best is None or mapped < best:
                best = mapped
    return best
