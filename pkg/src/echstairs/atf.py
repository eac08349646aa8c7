"""Almost toric base diagrams, nodal trades, mutations and the recursion.

A base diagram is a convex rational polygon decorated with nodal rays:
each ray leaves a vertex into the interior along a primitive integer
direction and carries a count of singular fibers.  Two moves act on
diagrams.  A nodal trade converts a smooth corner into a ray of one
node.  A mutation cuts the polygon along a ray, applies the unimodular
shear fixing the ray direction to the piece on one side, and reverses
the ray onto the exit point; the anchor corner flattens away and the
area is preserved exactly.

Replaying the scripted opening moves on the six Delzant polygons
yields seed diagrams whose mutation orbit realises the inner staircase
corners: the step from stage n to n + 1 is a single mutation whose
shear has the closed form M_n, and the diagram always contains the
triangle with legs b_n and a_n.  recursion_step re-derives the shear
from the diagram, asserts it equals M_n, and checks the full list of
recurrence relations in exact arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction as Q
from math import gcd

from .core import InternalCheckError
from .staircases import RecurrenceFamily, family, g

__all__ = [
    "BaseDiagram",
    "Ray",
    "RecursionState",
    "contains_ellipsoid_triangle",
    "diagram_svg",
    "lattice_key",
    "mutate",
    "nodal_trade",
    "pregame",
    "recursion_step",
]


def _cross(a, b) -> Q:
    return a[0] * b[1] - a[1] * b[0]


def _sub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def _neg(v):
    return (-v[0], -v[1])


def _mat_vec(m, v):
    return (m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1])


def _mat_mul(m, k):
    return (
        (m[0][0] * k[0][0] + m[0][1] * k[1][0], m[0][0] * k[0][1] + m[0][1] * k[1][1]),
        (m[1][0] * k[0][0] + m[1][1] * k[1][0], m[1][0] * k[0][1] + m[1][1] * k[1][1]),
    )


def _primitive(v):
    """Scale a rational vector to a primitive integer vector."""
    x, y = Q(v[0]), Q(v[1])
    if x == 0 and y == 0:
        raise ValueError("zero vector has no direction")
    scale = x.denominator * y.denominator // gcd(x.denominator, y.denominator)
    ix, iy = int(x * scale), int(y * scale)
    d = gcd(abs(ix), abs(iy))
    return (ix // d, iy // d)


@dataclass(frozen=True)
class Ray:
    """A nodal ray: anchor vertex index, primitive direction, node count."""

    anchor: int
    direction: tuple[int, int]
    nodes: int = 1

    def __post_init__(self):
        object.__setattr__(self, "direction", _primitive(self.direction))
        if self.nodes < 1:
            raise ValueError("a nodal ray carries at least one node")


@dataclass(frozen=True)
class BaseDiagram:
    """A convex counterclockwise polygon with nodal rays at vertices.

    The vertex cycle is rotated to start at the lexicographically
    smallest vertex and rays are sorted, so equal diagrams compare
    equal as values.
    """

    vertices: tuple[tuple[Q, Q], ...]
    rays: tuple[Ray, ...] = ()

    def __post_init__(self):
        verts = tuple((Q(p[0]), Q(p[1])) for p in self.vertices)
        m = len(verts)
        if m < 3:
            raise ValueError("a base diagram needs at least three vertices")
        for i in range(m):
            e = _sub(verts[(i + 1) % m], verts[i])
            f = _sub(verts[(i + 2) % m], verts[(i + 1) % m])
            if _cross(e, f) <= 0:
                raise ValueError("vertices must be strictly convex counterclockwise")
        shift = min(range(m), key=lambda i: verts[i])
        verts = verts[shift:] + verts[:shift]
        rays = tuple(
            Ray((r.anchor - shift) % m, r.direction, r.nodes) for r in self.rays
        )
        anchors = [r.anchor for r in rays]
        if len(set(anchors)) != len(anchors):
            raise ValueError("at most one ray per vertex")
        for r in rays:
            if not 0 <= r.anchor < m:
                raise ValueError("ray anchor out of range")
            a = _primitive(_sub(verts[(r.anchor + 1) % m], verts[r.anchor]))
            b = _primitive(_sub(verts[(r.anchor - 1) % m], verts[r.anchor]))
            if _cross(a, r.direction) <= 0 or _cross(r.direction, b) <= 0:
                raise ValueError("ray must point into the polygon interior")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "rays", tuple(sorted(rays, key=lambda r: r.anchor)))

    @property
    def area(self) -> Q:
        verts = self.vertices
        total = sum(_cross(verts[i], verts[(i + 1) % len(verts)]) for i in range(len(verts)))
        return total / 2

    def edge_directions(self):
        verts = self.vertices
        return tuple(
            _primitive(_sub(verts[(i + 1) % len(verts)], verts[i]))
            for i in range(len(verts))
        )

    def ray_at(self, point) -> int:
        """Index of the ray anchored at the given vertex point."""
        p = (Q(point[0]), Q(point[1]))
        for i, r in enumerate(self.rays):
            if self.vertices[r.anchor] == p:
                return i
        raise ValueError(f"no ray anchored at {p}")

    def as_dict(self):
        return {
            "vertices": [[str(x), str(y)] for x, y in self.vertices],
            "rays": [
                {
                    "anchor": list(map(str, self.vertices[r.anchor])),
                    "direction": list(r.direction),
                    "nodes": r.nodes,
                }
                for r in self.rays
            ],
        }


def lattice_key(d: BaseDiagram):
    """A comparison key invariant under affine lattice equivalence.

    Diagrams related by a translation composed with an orientation
    preserving unimodular map get equal keys.  Per boundary vertex the
    key records the corner determinant, the lattice length of the
    outgoing edge and the ray decoration (node count plus the ray
    determinants against both edges); the lexicographically smallest
    rotation makes it canonical.
    """
    verts = d.vertices
    m = len(verts)
    dirs = d.edge_directions()
    ray_at = {r.anchor: r for r in d.rays}
    items = []
    for i in range(m):
        edge = _sub(verts[(i + 1) % m], verts[i])
        length = Q(edge[0], dirs[i][0]) if dirs[i][0] else Q(edge[1], dirs[i][1])
        prev_dir = dirs[(i - 1) % m]
        r = ray_at.get(i)
        mark = (
            (r.nodes, _cross(prev_dir, r.direction), _cross(r.direction, dirs[i]))
            if r is not None
            else (0, 0, 0)
        )
        items.append((_cross(prev_dir, dirs[i]), length, mark))
    return min(tuple(items[i:] + items[:i]) for i in range(m))


def nodal_trade(d: BaseDiagram, vertex: int) -> BaseDiagram:
    """Replace a smooth corner by a one-node ray along the edge sum.

    The corner must be Delzant (primitive edge directions spanning the
    lattice) and carry no ray yet; the polygon itself is unchanged.
    """
    m = len(d.vertices)
    if not 0 <= vertex < m:
        raise ValueError("vertex index out of range")
    if any(r.anchor == vertex for r in d.rays):
        raise ValueError("vertex already anchors a nodal ray")
    a = _primitive(_sub(d.vertices[(vertex + 1) % m], d.vertices[vertex]))
    b = _primitive(_sub(d.vertices[(vertex - 1) % m], d.vertices[vertex]))
    if abs(_cross(a, b)) != 1:
        raise ValueError("nodal trade needs a smooth corner")
    ray = Ray(vertex, (a[0] + b[0], a[1] + b[1]), 1)
    return BaseDiagram(d.vertices, d.rays + (ray,))


def _exit_point(d: BaseDiagram, anchor: int, w):
    """Where the ray from a vertex leaves the polygon.

    Returns (point, vertex_index or None); the index is set when the
    ray exits through a vertex rather than an edge interior.
    """
    verts = d.vertices
    m = len(verts)
    apex = verts[anchor]
    best = None
    for i in range(m):
        p, r = verts[i], verts[(i + 1) % m]
        den = _cross(w, _sub(r, p))
        if den == 0:
            continue
        t = _cross(_sub(p, apex), _sub(r, p)) / den
        u = _cross(_sub(p, apex), w) / den
        if t <= 0 or u < 0 or u > 1:
            continue
        if best is None or t < best[0]:
            hit = (p[0] + u * (r[0] - p[0]), p[1] + u * (r[1] - p[1]))
            index = i if u == 0 else ((i + 1) % m if u == 1 else None)
            best = (t, hit, index, i)
    if best is None:
        raise InternalCheckError("ray never leaves the polygon")
    return best[1], best[2], best[3]


def _shear_data(d: BaseDiagram, ray_index: int):
    """Exit, shear matrix and merge target for mutating one ray."""
    ray = d.rays[ray_index]
    verts = d.vertices
    m = len(verts)
    apex = verts[ray.anchor]
    w = ray.direction
    exit_pt, exit_vertex, exit_edge = _exit_point(d, ray.anchor, w)
    merge = None
    if exit_vertex is not None:
        for j, other in enumerate(d.rays):
            if other.anchor == exit_vertex and other.direction == _neg(w):
                merge = j
                break
        if merge is None:
            raise ValueError("ray exits at a vertex with no opposite ray")
    s = ray.nodes
    # Unimodular shear fixing w; conormal ell = (-w_y, w_x), so the
    # piece with cross(w, x - apex) > 0 moves by x -> apex + M(x - apex).
    mat = (
        (1 + s * w[0] * w[1], -s * w[0] * w[0]),
        (s * w[1] * w[1], 1 - s * w[0] * w[1]),
    )
    e_plus = _primitive(_sub(verts[(ray.anchor + 1) % m], apex))
    e_minus = _primitive(_sub(verts[(ray.anchor - 1) % m], apex))
    if _cross(w, e_plus) < 0:
        e_plus, e_minus = e_minus, e_plus
    bent = _mat_vec(mat, e_plus)
    if _cross(bent, e_minus) != 0 or bent[0] * e_minus[0] + bent[1] * e_minus[1] >= 0:
        raise ValueError(
            f"mutation with {s} nodes does not flatten the corner at {apex}"
        )
    return exit_pt, exit_vertex, exit_edge, merge, mat


def mutate(d: BaseDiagram, ray_index: int) -> BaseDiagram:
    """Mutate the diagram along one nodal ray.

    The ray must exit through the interior of an edge, or at a vertex
    anchoring the opposite ray (in which case the two rays merge).
    The piece on the positive side of the ray is sheared so that the
    anchor corner flattens; the reversed ray re-anchors at the exit.
    """
    ray = d.rays[ray_index]
    verts = list(d.vertices)
    apex = verts[ray.anchor]
    w = ray.direction
    exit_pt, exit_vertex, exit_edge, merge, mat = _shear_data(d, ray_index)

    def warp(p):
        moved = _mat_vec(mat, _sub(p, apex))
        return (apex[0] + moved[0], apex[1] + moved[1])

    cycle = list(verts)
    if exit_vertex is None:
        cycle.insert(exit_edge + 1, exit_pt)
    carried = []
    for r in d.rays:
        if r is ray or (merge is not None and r is d.rays[merge]):
            continue
        p = verts[r.anchor]
        if p == apex:
            raise ValueError("a second ray anchored at the mutating vertex")
        carried.append((p, r.direction, r.nodes))
    moved_cycle = []
    for p in cycle:
        if p == apex:
            continue
        side = _cross(w, _sub(p, apex))
        moved_cycle.append(warp(p) if side > 0 else p)
    new_verts = []
    k = len(moved_cycle)
    for i, p in enumerate(moved_cycle):
        before = moved_cycle[(i - 1) % k]
        after = moved_cycle[(i + 1) % k]
        if _cross(_sub(p, before), _sub(after, p)) != 0:
            new_verts.append(p)
    new_rays = []
    nodes = ray.nodes + (d.rays[merge].nodes if merge is not None else 0)
    new_rays.append((exit_pt, _neg(w), nodes))
    for p, direction, count in carried:
        side = _cross(w, _sub(p, apex))
        if side > 0:
            new_rays.append((warp(p), _mat_vec(mat, direction), count))
        else:
            new_rays.append((p, direction, count))
    index_of = {p: i for i, p in enumerate(new_verts)}
    try:
        rays = tuple(
            Ray(index_of[p], direction, count) for p, direction, count in new_rays
        )
    except KeyError as gone:
        raise InternalCheckError(f"ray anchor {gone} dissolved in mutation") from None
    out = BaseDiagram(tuple(new_verts), rays)
    if out.area != d.area:
        raise InternalCheckError("mutation failed to preserve area")
    return out


def _blowup(d: BaseDiagram, vertex: int, size) -> BaseDiagram:
    """Chop a smooth ray-free corner, a toric blowup of the given size."""
    m = len(d.vertices)
    v = d.vertices[vertex]
    if any(r.anchor == vertex for r in d.rays):
        raise ValueError("cannot blow up at a vertex with a ray")
    a = _primitive(_sub(d.vertices[(vertex + 1) % m], v))
    b = _primitive(_sub(d.vertices[(vertex - 1) % m], v))
    if abs(_cross(a, b)) != 1:
        raise ValueError("toric blowup needs a smooth corner")
    size = Q(size)
    if size <= 0:
        raise ValueError("blowup size must be positive")
    cut_b = (v[0] + size * b[0], v[1] + size * b[1])
    cut_a = (v[0] + size * a[0], v[1] + size * a[1])
    verts = list(d.vertices)
    verts[vertex:vertex + 1] = [cut_b, cut_a]
    anchored = [(d.vertices[r.anchor], r.direction, r.nodes) for r in d.rays]
    index_of = {p: i for i, p in enumerate(verts)}
    rays = tuple(Ray(index_of[p], direction, n) for p, direction, n in anchored)
    return BaseDiagram(tuple(verts), rays)


_V0_PIN = {"(3;1)": (-1, 0), "(3;1,1)": (0, -1)}


def _vec_u(fam: RecurrenceFamily, n: int):
    return (-g(fam, n), g(fam, n + fam.J))


def _vec_w(fam: RecurrenceFamily, n: int):
    if fam.J == 2:
        return (
            fam.sigma_at(n + 1) * g(fam, n + 1) ** 2,
            -fam.sigma_at(n + 2) * g(fam, n + 2) ** 2,
        )
    return (g(fam, n + 1), -g(fam, n + 4))


def _vec_v(fam: RecurrenceFamily, n: int):
    if fam.J == 2:
        return (g(fam, n + 1), -g(fam, n + 3))
    if n == 0:
        return _V0_PIN[fam.name]
    return _mat_vec(_matrix(fam, n - 1), _vec_u(fam, n - 1))


def _vec_r(fam: RecurrenceFamily, n: int):
    return (
        fam.sigma_at(n) * g(fam, n) * g(fam, n + 3) - 1,
        -fam.sigma_at(n + 3) * g(fam, n + 3) ** 2,
    )


def _vec_s(fam: RecurrenceFamily, n: int):
    return (
        fam.sigma_at(n + 1) * g(fam, n + 1) ** 2,
        1 - fam.sigma_at(n + 1) * g(fam, n + 1) * g(fam, n + 4),
    )


def _matrix(fam: RecurrenceFamily, n: int):
    if fam.J == 2:
        p = fam.sigma_at(n + 1) * g(fam, n + 1) ** 2
        q = fam.sigma_at(n + 2) * g(fam, n + 2) ** 2
        return ((-q, -p), (fam.sigma_at(n + 3) * g(fam, n + 3) ** 2, 2 + q))
    p = fam.sigma_at(n + 1) * g(fam, n + 1) ** 2
    t = fam.sigma_at(n + 1) * g(fam, n + 1) * g(fam, n + 4)
    return ((1 - t, -p), (fam.sigma_at(n + 4) * g(fam, n + 4) ** 2, 1 + t))


def _leg_a(fam: RecurrenceFamily, n: int) -> Q:
    return Q(g(fam, n + 1) + g(fam, n + 1 + fam.J), g(fam, n + 1))


def _leg_b(fam: RecurrenceFamily, n: int) -> Q:
    return Q(g(fam, n) + g(fam, n + fam.J), g(fam, n + fam.J))


def _quad_corner(fam: RecurrenceFamily, n: int):
    """P_n with the side lengths c_n, d_n of the two slanted edges."""
    b, a = _leg_b(fam, n), _leg_a(fam, n)
    r, s = _vec_r(fam, n), _vec_s(fam, n)
    # (b, 0) - c*r = (0, a) + d*s, solved exactly for c and d.
    den = _cross(r, s)
    if den == 0:
        raise InternalCheckError("slanted edges are parallel")
    rhs = (-b, a)
    c = _cross(rhs, s) / -den
    dd = _cross(r, rhs) / -den
    if c <= 0 or dd <= 0:
        raise InternalCheckError("degenerate quadrilateral side lengths")
    point = (b - c * r[0], -c * r[1])
    other = (dd * s[0], a + dd * s[1])
    if point != other:
        raise InternalCheckError("the two routes to the slanted corner disagree")
    return point, c, dd


def _closed_diagram(fam: RecurrenceFamily, n: int) -> BaseDiagram:
    a, b = _leg_a(fam, n), _leg_b(fam, n)
    if fam.J == 2:
        verts = ((Q(0), Q(0)), (b, Q(0)), (Q(0), a))
        rays = (
            Ray(1, _vec_u(fam, n), fam.sigma_at(n)),
            Ray(2, _vec_v(fam, n), fam.sigma_at(n + 1)),
        )
        return BaseDiagram(verts, rays)
    point, _, _ = _quad_corner(fam, n)
    verts = ((Q(0), Q(0)), (b, Q(0)), point, (Q(0), a))
    rays = (
        Ray(1, _vec_u(fam, n), fam.sigma_at(n)),
        Ray(2, _vec_v(fam, n), fam.sigma_at(n + 2)),
        Ray(3, _vec_w(fam, n), fam.sigma_at(n + 1)),
    )
    return BaseDiagram(verts, rays)


@dataclass(frozen=True)
class RecursionState:
    """One stage of the mutation recursion for a staircase family.

    Carries the exact diagram together with the closed-form data: legs
    a, b, the slant lengths c (and d when the diagram is a
    quadrilateral), the ray vectors u, v, w (plus edge vectors r, s),
    and the shear M that performs the next mutation.
    """

    case: RecurrenceFamily
    n: int

    def __post_init__(self):
        fam = family(self.case)
        object.__setattr__(self, "case", fam)
        if self.n < 0:
            raise ValueError("recursion stage must be nonnegative")
        if fam.J == 2:
            hyp = (self.b, -self.a)
            if _cross(hyp, self.w) != 0 or self.w[0] <= 0:
                raise InternalCheckError("hypotenuse does not follow w")

    @property
    def a(self) -> Q:
        return _leg_a(self.case, self.n)

    @property
    def b(self) -> Q:
        return _leg_b(self.case, self.n)

    @property
    def c(self) -> Q:
        if self.case.J == 2:
            return self.b / self.w[0]
        return _quad_corner(self.case, self.n)[1]

    @property
    def d(self) -> Q:
        if self.case.J == 2:
            raise AttributeError("triangle stages have no second slant length")
        return _quad_corner(self.case, self.n)[2]

    @property
    def u(self):
        return _vec_u(self.case, self.n)

    @property
    def v(self):
        return _vec_v(self.case, self.n)

    @property
    def w(self):
        return _vec_w(self.case, self.n)

    @property
    def r(self):
        if self.case.J == 2:
            raise AttributeError("triangle stages have no edge vector r")
        return _vec_r(self.case, self.n)

    @property
    def s(self):
        if self.case.J == 2:
            raise AttributeError("triangle stages have no edge vector s")
        return _vec_s(self.case, self.n)

    @property
    def M(self):
        return _matrix(self.case, self.n)

    @property
    def diagram(self) -> BaseDiagram:
        return _closed_diagram(self.case, self.n)


def _check(ok: bool, fam: RecurrenceFamily, n: int, item: int):
    if not ok:
        raise InternalCheckError(
            f"recursion check ({item}) failed for {fam.name} at n={n}"
        )


def recursion_step(state: RecursionState) -> RecursionState:
    """Advance the recursion by one mutation, verifying every relation.

    The closed-form relations are checked in exact arithmetic (items
    (1)-(9) for triangles, (1)-(12) for quadrilaterals), then the
    mutation is replayed on the diagram and the generic shear is
    asserted to coincide with M_n.
    """
    fam, n = state.case, state.n
    nxt = RecursionState(fam, n + 1)
    m = state.M
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    if fam.J == 2:
        _check(_mat_vec(m, state.v) == state.v, fam, n, 1)
        _check(_mat_vec(m, state.w) == (0, 1), fam, n, 2)
        _check(det == 1, fam, n, 3)
        _check(nxt.w == _mat_vec(m, (-1, 0)), fam, n, 4)
        _check(nxt.v == _mat_vec(m, state.u), fam, n, 5)
        _check(nxt.u == _neg(state.v), fam, n, 6)
        _check(nxt.a == state.a + state.c, fam, n, 7)
        _check(nxt.b == -state.a * Q(state.v[0], state.v[1]), fam, n, 8)
        _check(nxt.c == state.b - nxt.b, fam, n, 9)
        moving = state.diagram.ray_at((0, state.a))
    else:
        _check(_mat_vec(m, state.w) == state.w, fam, n, 1)
        _check(_mat_vec(m, state.s) == (0, 1), fam, n, 2)
        _check(det == 1, fam, n, 3)
        _check(nxt.s == _mat_vec(m, state.r), fam, n, 4)
        _check(nxt.r == _mat_vec(m, (-1, 0)), fam, n, 5)
        _check(nxt.v == _mat_vec(m, state.u), fam, n, 6)
        _check(nxt.w == _mat_vec(m, state.v), fam, n, 7)
        if n >= 1:
            prev = _mat_mul(m, _matrix(fam, n - 1))
            _check(nxt.w == _mat_vec(prev, _vec_u(fam, n - 1)), fam, n, 7)
        _check(nxt.u == _neg(state.w), fam, n, 8)
        _check(nxt.a == state.a + state.d, fam, n, 9)
        _check(nxt.d == state.c, fam, n, 10)
        _check(nxt.b == -state.a * Q(state.w[0], state.w[1]), fam, n, 11)
        _check(nxt.c == state.b - nxt.b, fam, n, 12)
        moving = state.diagram.ray_at((0, state.a))
    diagram = state.diagram
    _, _, _, _, shear = _shear_data(diagram, moving)
    if shear != m:
        raise InternalCheckError(
            f"replayed shear differs from the closed form for {fam.name} at n={n}"
        )
    if mutate(diagram, moving) != nxt.diagram:
        raise InternalCheckError(
            f"mutation did not reproduce the closed-form diagram at n={n + 1}"
        )
    return nxt


def contains_ellipsoid_triangle(state: RecursionState) -> bool:
    """Whether the triangle with legs b_n, a_n sits inside the diagram."""
    tri = ((Q(0), Q(0)), (state.b, Q(0)), (Q(0), state.a))
    verts = state.diagram.vertices
    m = len(verts)
    for i in range(m):
        edge = _sub(verts[(i + 1) % m], verts[i])
        if any(_cross(edge, _sub(p, verts[i])) < 0 for p in tri):
            return False
    return True


def _expect(d: BaseDiagram, nverts: int, nrays: int, label: str):
    if len(d.vertices) != nverts or len(d.rays) != nrays:
        raise InternalCheckError(
            f"{label}: expected {nverts} vertices and {nrays} rays, "
            f"found {len(d.vertices)} and {len(d.rays)}"
        )


def pregame(case) -> BaseDiagram:
    """Replay the opening moves that produce the stage-0 diagram.

    Starting from the Delzant polygon of the case (for (3;1,1,1,1),
    from a size-1 toric blowup of the finished (3;1,1,1) diagram), the
    scripted nodal trades and mutations are applied move by move; the
    result is asserted to be the exact closed-form stage-0 diagram.
    """
    fam = family(case)
    name = fam.name
    if name == "(3)":
        d = BaseDiagram(((0, 0), (3, 0), (0, 3)))
        for corner in ((3, 0), (0, 3)):
            d = nodal_trade(d, d.vertices.index((Q(corner[0]), Q(corner[1]))))
    elif name == "(3;1)":
        d = BaseDiagram(((0, 0), (2, 0), (2, 1), (0, 3)))
        for corner in ((2, 0), (2, 1), (0, 3)):
            d = nodal_trade(d, d.vertices.index((Q(corner[0]), Q(corner[1]))))
    elif name == "(4;2,2)":
        d = BaseDiagram(((0, 0), (2, 0), (2, 2), (0, 2)))
        for corner in ((2, 0), (2, 2), (0, 2)):
            d = nodal_trade(d, d.vertices.index((Q(corner[0]), Q(corner[1]))))
        d = mutate(d, d.ray_at((0, 2)))
        _expect(d, 3, 2, f"{name} mutation")
    elif name == "(3;1,1)":
        d = BaseDiagram(((0, 0), (2, 0), (2, 1), (1, 2), (0, 2)))
        for corner in ((2, 0), (2, 1), (1, 2), (0, 2)):
            d = nodal_trade(d, d.vertices.index((Q(corner[0]), Q(corner[1]))))
        d = mutate(d, d.ray_at((0, 2)))
        _expect(d, 4, 3, f"{name} mutation")
    elif name == "(3;1,1,1)":
        d = BaseDiagram(((1, 0), (2, 0), (2, 1), (1, 2), (0, 2), (0, 1)))
        for corner in ((1, 0), (2, 0), (2, 1), (1, 2), (0, 2)):
            d = nodal_trade(d, d.vertices.index((Q(corner[0]), Q(corner[1]))))
        d = mutate(d, d.ray_at((0, 2)))
        _expect(d, 5, 4, f"{name} first mutation")
        d = mutate(d, d.ray_at((1, 0)))
        _expect(d, 4, 3, f"{name} second mutation")
        d = mutate(d, d.ray_at((0, 2)))
        _expect(d, 3, 2, f"{name} third mutation")
    elif name == "(3;1,1,1,1)":
        d = pregame("(3;1,1,1)")
        d = _blowup(d, d.vertices.index((Q(0), Q(0))), 1)
        _expect(d, 4, 2, f"{name} toric blowup")
        d = nodal_trade(d, d.vertices.index((Q(1), Q(0))))
        d = mutate(d, d.ray_at((1, 0)))
        _expect(d, 4, 3, f"{name} first mutation")
        d = mutate(d, d.ray_at((0, 2)))
        _expect(d, 3, 2, f"{name} second mutation")
    else:
        raise ValueError(f"no pregame script for {name}")
    seed = _closed_diagram(fam, 0)
    if d != seed:
        raise InternalCheckError(f"pregame for {name} missed the stage-0 diagram")
    return d


def diagram_svg(d: BaseDiagram, scale=28, pad=20) -> str:
    """Render a base diagram as a small self-contained SVG."""
    xs = [p[0] for p in d.vertices] + [0]
    ys = [p[1] for p in d.vertices] + [0]
    xmax, ymax = max(xs), max(ys)
    w = int(scale * xmax) + 2 * pad
    h = int(scale * ymax) + 2 * pad

    def at(p):
        return f"{pad + float(scale * Q(p[0]))},{pad + float(scale * (ymax - Q(p[1])))}"

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
        '<g fill="#f4ecd7" stroke="#b8935b" stroke-width="1.5">',
        f'<polygon points="{" ".join(at(p) for p in d.vertices)}"/>',
        "</g>",
    ]
    for r in d.rays:
        apex = d.vertices[r.anchor]
        exit_pt, _, _ = _exit_point(d, r.anchor, r.direction)
        lines.append(
            f'<line x1="{at(apex).split(",")[0]}" y1="{at(apex).split(",")[1]}" '
            f'x2="{at(exit_pt).split(",")[0]}" y2="{at(exit_pt).split(",")[1]}" '
            'stroke="#b0413e" stroke-width="2" stroke-dasharray="6 3"/>'
        )
        mid = ((apex[0] + exit_pt[0]) / 2, (apex[1] + exit_pt[1]) / 2)
        lines.append(
            f'<text x="{at(mid).split(",")[0]}" y="{at(mid).split(",")[1]}" '
            f'fill="#b0413e" font-size="12">{r.nodes}</text>'
        )
    lines.append("</svg>")
    return "\n".join(lines)
