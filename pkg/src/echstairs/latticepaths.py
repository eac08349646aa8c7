"""Convex lattice paths and the path formulation of capacities.

A path runs through the first quadrant from a start on the y-axis to an
end on the x-axis, its edge directions rotating clockwise.  Ascending
edges are allowed as long as the rotation never reverses, and a vertical
drop may appear as the final edge.  Two quantities are attached to a
path: the number of lattice points it encloses against the axes, and
its length measured against a region, where each edge counts the
determinant against the region's support point in the edge direction.
The k-th capacity of the region is the shortest such length among paths
enclosing exactly k+1 points.
"""
from __future__ import annotations

import functools
from fractions import Fraction as Q
from math import gcd, lcm

from ._geom import (
    cross,
    edge_cycle_key,
    interior_lattice_count,
    normalize_polygon,
    support,
    vsub,
)
from .core import InternalCheckError

__all__ = [
    "FANO_DOMAINS",
    "REFLEXIVE_DOMAINS",
    "ck_table",
    "ck_via_paths",
    "enumerate_reflexive",
    "fano_catalogue",
    "lambda_family",
    "path_ell",
    "path_lattice_count",
    "path_svg",
    "verify_lambda",
]


def _check_path(path):
    pts = []
    for p in path:
        x, y = p
        if x != int(x) or y != int(y):
            raise ValueError("path vertices must be lattice points")
        x, y = int(x), int(y)
        if x < 0 or y < 0:
            raise ValueError("path vertices must stay in the first quadrant")
        pts.append((x, y))
    if not pts:
        raise ValueError("empty path")
    if pts[0][0] != 0:
        raise ValueError("a path starts on the y-axis")
    if pts[-1][1] != 0:
        raise ValueError("a path ends on the x-axis")
    edges = []
    for a, b in zip(pts, pts[1:]):
        e = (b[0] - a[0], b[1] - a[1])
        if e == (0, 0):
            raise ValueError("repeated path vertex")
        if e[0] < 0 or (e[0] == 0 and e[1] > 0):
            raise ValueError("path edges must move rightward or drop")
        edges.append(e)
    for e, f in zip(edges, edges[1:]):
        if cross(e, f) > 0:
            raise ValueError("path edges must rotate clockwise")
    return pts


def path_lattice_count(path):
    """Number of lattice points between the path and the two axes.

    The region is the polygon closed through the origin; its points are
    counted with the boundary included.  A path that collapses to a
    segment on an axis counts the points of the segment, and a single
    vertex counts one.
    """
    pts = _check_path(path)
    if len(pts) == 1:
        return 1
    shoelace = 0
    bnd = pts[0][1] + pts[-1][0]
    for (ax, ay), (bx, by) in zip(pts, pts[1:]):
        shoelace += ax * by - ay * bx
        bnd += gcd(abs(bx - ax), abs(by - ay))
    # the closed cycle runs clockwise, so the shoelace sum is <= 0
    return (-shoelace + bnd) // 2 + 1


def path_ell(omega, path):
    """Length of the path measured against the region `omega`.

    Each edge vector nu contributes det(nu, p) where p is the support
    point of omega in direction nu (ties broken lexicographically).
    """
    pts = _check_path(path)
    om = normalize_polygon(omega)
    total = Q(0)
    for a, b in zip(pts, pts[1:]):
        nu = vsub(b, a)
        total += support(om, nu)[0]
    return total


def ck_table(omega, kmax):
    """Capacities c_0 .. c_kmax of `omega` by exhaustive path search.

    The search is exact but its cost climbs steeply with kmax; it is
    meant for cross-checks in the k <= 20 range.  Results are cached
    per (region, kmax), so ask for the whole table rather than looping
    over single indices.
    """
    if kmax < 0:
        raise ValueError("kmax must be nonnegative")
    om = normalize_polygon(omega)
    vals = _ck_search(tuple(om), int(kmax))
    if any(v is None for v in vals):
        raise InternalCheckError(f"path search missed a point count <= {kmax + 1}")
    return list(vals)


def ck_via_paths(omega, k):
    """The k-th capacity of `omega`: the shortest path length among
    convex lattice paths enclosing exactly k+1 points."""
    return ck_table(omega, k)[k]


@functools.lru_cache(maxsize=None)
def _ck_search(om, kmax):
    budget = kmax + 1
    dirs = []
    for dx in range(1, budget + 1):
        for dy in range(-budget, budget + 1):
            if gcd(dx, abs(dy)) == 1:
                dirs.append((dx, dy))
    dirs.sort(key=functools.cmp_to_key(cross))

    den = 1
    raw = []
    for d in dirs:
        v = support(om, d)[0]
        if v < 0:
            raise ValueError("region must sit in the first quadrant at the origin")
        raw.append(v)
        den = lcm(den, Q(v).denominator)
    dval = support(om, (0, -1))[0]
    den = lcm(den, Q(dval).denominator)
    inc = [int(v * den) for v in raw]
    drop = int(dval * den)

    nd = len(dirs)
    inf = float("inf")
    best = [inf] * budget

    def settle(x, y, sho, bnd, h, ell):
        area2 = x * y - sho
        count = (area2 + h + bnd + y + x) // 2 + 1
        total = ell + y * drop
        if total < best[count - 1]:
            best[count - 1] = total

    def walk(x, y, di, sho, bnd, h, ell):
        settle(x, y, sho, bnd, h, ell)
        for j in range(di, nd):
            dx, dy = dirs[j]
            ny = y + dy
            if ny < 0:
                continue
            nx = x + dx
            nsho = sho + x * ny - y * nx
            nbnd = bnd + 1
            count = (nx * ny - nsho + h + nbnd + ny + nx) // 2 + 1
            if count > budget:
                continue
            nell = ell + inc[j]
            if nell >= max(best[count - 1 :]):
                continue
            walk(nx, ny, j, nsho, nbnd, h, nell)

    for h in range(budget):
        walk(0, h, 0, 0, 0, h, 0)

    return tuple(None if b is inf else Q(int(b), den) for b in best)


def path_svg(omega, path, scale=28, pad=20):
    """Render the region and a path as a small self-contained SVG."""
    om = normalize_polygon(omega)
    pts = _check_path(path)
    xs = [p[0] for p in om] + [p[0] for p in pts] + [0]
    ys = [p[1] for p in om] + [p[1] for p in pts] + [0]
    xmax, ymax = max(xs), max(ys)
    w = int(scale * xmax) + 2 * pad
    h = int(scale * ymax) + 2 * pad

    def at(p):
        return f"{pad + scale * Q(p[0])},{pad + scale * (ymax - Q(p[1]))}"

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
        '<g fill="#d7e3f4" stroke="#5b81b8" stroke-width="1.5">',
        f'<polygon points="{" ".join(at(p) for p in om)}"/>',
        "</g>",
        '<g fill="#888">',
    ]
    for gx in range(int(xmax) + 1):
        for gy in range(int(ymax) + 1):
            lines.append(f'<circle cx="{pad + scale * gx}" cy="{pad + scale * (ymax - gy)}" r="1.6"/>')
    lines.append("</g>")
    poly = " ".join(at(p) for p in pts)
    lines.append(
        f'<polyline points="{poly}" fill="none" stroke="#b0413e" stroke-width="2.5"/>'
    )
    lines.append('<g fill="#b0413e">')
    for p in pts:
        lines.append(f'<circle cx="{at(p).split(",")[0]}" cy="{at(p).split(",")[1]}" r="3"/>')
    lines.append("</g></svg>")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# reflexive lattice polygons


def _angle_class(p):
    x, y = p
    if y == 0:
        return 0 if x > 0 else 4
    if y > 0:
        return 1 if x > 0 else (2 if x == 0 else 3)
    return 5 if x < 0 else (6 if x == 0 else 7)


def _angle_cmp(u, v):
    cu, cv = _angle_class(u), _angle_class(v)
    if cu != cv:
        return cu - cv
    c = cross(u, v)
    if c != 0:
        return -1 if c > 0 else 1
    return (abs(u[0]) + abs(u[1])) - (abs(v[0]) + abs(v[1]))


def enumerate_reflexive(bound=2):
    """All convex lattice polygons with exactly one interior point, up to
    affine unimodular equivalence.

    Vertices are searched inside [-bound, bound]^2 around the interior
    point; the default box is already large enough to see every class.
    Returns one representative per class, keyed order fixed by the
    canonical edge cycle.
    """
    pts = sorted(
        (
            (x, y)
            for x in range(-bound, bound + 1)
            for y in range(-bound, bound + 1)
            if (x, y) != (0, 0)
        ),
        key=functools.cmp_to_key(_angle_cmp),
    )
    n = len(pts)
    found = {}

    def close_ok(chain):
        a, b = chain[-1], chain[0]
        if cross(a, b) <= 0:
            return False
        e_last = vsub(b, a)
        if cross(vsub(a, chain[-2]), e_last) <= 0:
            return False
        return cross(e_last, vsub(chain[1], b)) > 0

    def grow(chain, last_idx):
        if len(chain) >= 3 and close_ok(chain):
            poly = tuple(chain)
            if interior_lattice_count(poly) == 1:
                key = edge_cycle_key(poly)
                if key not in found:
                    found[key] = poly
        for j in range(last_idx + 1, n):
            q = pts[j]
            if cross(chain[-1], q) <= 0:
                continue
            if len(chain) >= 2 and cross(vsub(chain[-1], chain[-2]), vsub(q, chain[-1])) <= 0:
                continue
            chain.append(q)
            grow(chain, j)
            chain.pop()

    for i in range(n):
        grow([pts[i]], i)

    return [found[k] for k in sorted(found)]


# Named catalogue: one placement for each of the sixteen equivalence
# classes, normalized so the region sits in the first quadrant touching
# both axes.  Capacities depend on the placement, so these exact
# vertices are part of the contract.
REFLEXIVE_DOMAINS = {
    "ball": ((0, 0), (3, 0), (0, 3)),
    "e24": ((0, 0), (4, 0), (0, 2)),
    "square": ((0, 0), (2, 0), (2, 2), (0, 2)),
    "trapezoid": ((0, 0), (2, 0), (2, 1), (0, 3)),
    "quad7": ((0, 0), (2, 0), (1, 2), (0, 3)),
    "pent7": ((0, 0), (2, 0), (2, 1), (1, 2), (0, 2)),
    "e23": ((0, 0), (3, 0), (0, 2)),
    "quad6": ((0, 0), (2, 0), (1, 2), (0, 2)),
    "pent6": ((0, 0), (2, 0), (2, 1), (1, 2), (0, 1)),
    "hex": ((1, 0), (2, 0), (2, 1), (1, 2), (0, 2), (0, 1)),
    "quad5": ((0, 0), (2, 0), (1, 2), (0, 1)),
    "pent5": ((1, 0), (2, 1), (1, 2), (0, 2), (0, 1)),
    "diamond": ((1, 0), (2, 1), (1, 2), (0, 1)),
    "quad4": ((0, 0), (1, 0), (2, 1), (1, 2)),
    "tri4": ((0, 0), (2, 0), (1, 2)),
    "tri3": ((1, 0), (2, 1), (0, 2)),
}

# Twelve regions for the six staircase weight vectors, two or more per
# vector where distinct shapes exist.  Every entry is in normal position
# (the region is 0 <= y <= f(x) with the origin corner interior to the
# quadrant side), which is exactly when the path formula computes the
# capacities of the ball-peeling pipeline; the pentagon and hexagon
# classes with five and six lattice points have no such placement, so
# the vectors (3;1,1) and (3;1,1,1) appear here through extra shapes.
FANO_DOMAINS = {
    "ball": (((0, 0), (3, 0), (0, 3)), "3"),
    "e24": (((0, 0), (4, 0), (0, 2)), "4;2,2"),
    "square": (((0, 0), (2, 0), (2, 2), (0, 2)), "4;2,2"),
    "trapezoid": (((0, 0), (2, 0), (2, 1), (0, 3)), "3;1"),
    "trapezoid_wide": (((0, 0), (3, 0), (1, 2), (0, 2)), "3;1"),
    "quad7": (((0, 0), (2, 0), (1, 2), (0, 3)), "3;1,1"),
    "pent7": (((0, 0), (2, 0), (2, 1), (1, 2), (0, 2)), "3;1,1"),
    "e23": (((0, 0), (3, 0), (0, 2)), "3;1,1,1"),
    "e32": (((0, 0), (2, 0), (0, 3)), "3;1,1,1"),
    "quad6": (((0, 0), (2, 0), (1, 2), (0, 2)), "3;1,1,1"),
    "pent6": (((0, 0), (2, 0), (2, 1), (1, 2), (0, 1)), "3;1,1,1"),
    "quad5": (((0, 0), (2, 0), (1, 2), (0, 1)), "3;1,1,1,1"),
}


def fano_catalogue():
    """(name, vertices, expansion string) for the twelve staircase regions."""
    return [(name, v, e) for name, (v, e) in FANO_DOMAINS.items()]


# Region used to measure the witness paths of each staircase family.
_LAMBDA_REGION = {
    "(3)": REFLEXIVE_DOMAINS["ball"],
    "(4;2,2)": REFLEXIVE_DOMAINS["square"],
    "(3;1)": REFLEXIVE_DOMAINS["trapezoid"],
    "(3;1,1)": REFLEXIVE_DOMAINS["pent7"],
    "(3;1,1,1)": REFLEXIVE_DOMAINS["quad6"],
    "(3;1,1,1,1)": REFLEXIVE_DOMAINS["quad5"],
}


def _dedupe(verts):
    out = [verts[0]]
    for v in verts[1:]:
        if v != out[-1]:
            out.append(v)
    return out


def lambda_family(case, n):
    """Witness data (s_n, t_n, path) for the n-th outer staircase corner.

    The sizes come from the family registry,

        s_n = (head*(g(n) + g(n+J)) + c_n) / vol,
        t_n = (part*(g(n) + g(n+J)) + d_n) / vol,

    and both are necessarily integers; a remainder trips an internal
    check.  The path is the size-s_n triangle with corners truncated by
    t_n in the arrangement the case and the residue of n dictate, so its
    point count and length can be read off in closed form.
    """
    from .staircases import family, g

    fam = family(case)
    if n < 0:
        raise ValueError("corner index must be nonnegative")
    total = g(fam, n) + g(fam, n + fam.J)
    num = fam.head * total + fam.c_at(n)
    if num % fam.vol:
        raise InternalCheckError(f"{fam.name}: s_{n} = {num}/{fam.vol} is not integral")
    s = num // fam.vol
    t = 0
    if fam.copies:
        num = fam.part * total + fam.d_at(n)
        if num % fam.vol:
            raise InternalCheckError(
                f"{fam.name}: t_{n} = {num}/{fam.vol} is not integral"
            )
        t = num // fam.vol
    name = fam.name
    if name == "(3)":
        verts = [(0, s), (s, 0)]
    elif name == "(4;2,2)":
        side = s - t
        if n % 2 == 0:
            verts = [(0, side), (side + 1, side), (side + 1, 0)]
        else:
            verts = [(0, side), (side, side), (side, 0)]
    elif name == "(3;1)":
        verts = [(0, s), (s - t, t), (s - t, 0)]
    elif name == "(3;1,1)":
        if n % 3 == 0:
            verts = [(0, s - t), (t, s - t), (s - t + 1, t - 1), (s - t + 1, 0)]
        else:
            verts = [(0, s - t), (t, s - t), (s - t, t), (s - t, 0)]
    elif name == "(3;1,1,1)":
        if n % 4 == 0:
            verts = [(0, s - t), (t, s - t), (2 * t, s - 3 * t), (2 * t, 0)]
        elif n % 4 == 1:
            verts = [(0, s - t), (t - 1, s - t), (t, s - t - 1), (s - t, 0)]
        elif n % 4 == 2:
            verts = [(0, s - t + 1), (t - 1, s - t + 1), (s - t, 0)]
        else:
            verts = [(0, s - t), (t, s - t), (t + 1, s - t - 1), (s - t, 0)]
    else:  # (3;1,1,1,1)
        if n % 2:
            verts = [(0, t), (t, 2 * t), (2 * t, 0)]
        else:
            run = (s - t - 1) // 2
            verts = [
                (0, t),
                (s - 2 * t, s - t),
                (s - 2 * t + run, s - t - 2 * run),
                (s - 2 * t + run, 0),
            ]
    return s, t, _dedupe(verts)


def _lambda_count_closed(fam, n, s, t):
    base = (s + 1) * (s + 2)
    name = fam.name
    if name == "(3)":
        cut = 0
    elif name == "(4;2,2)":
        cut = t * (t + 1) + t * (t - 1) if n % 2 == 0 else 2 * t * (t + 1)
    elif name == "(3;1)":
        cut = t * (t + 1)
    elif name == "(3;1,1)":
        cut = t * (t + 1) + t * (t - 1) if n % 3 == 0 else 2 * t * (t + 1)
    elif name == "(3;1,1,1)":
        e = fam.e_at(n)
        cut = 2 * t * (t + 1) + (t - e) * (t - e + 1)
    else:  # (3;1,1,1,1)
        cut = 4 * t * (t + 1)
    if (base - cut) % 2:
        raise InternalCheckError(f"{fam.name}: odd closed point count at n = {n}")
    return (base - cut) // 2


def verify_lambda(case, n, detail=None):
    """Check the n-th witness path of a staircase family all four ways.

    True iff the geometric point count and region length of the path
    AND their closed forms all equal the targets

        L = (g(n)+1)(g(n+J)+1)/2   and   ell = g(n) + g(n+J),

    exactly.  When a list is passed as `detail`, every failed equality
    appends a line describing which route disagreed.
    """
    from .staircases import family, g

    fam = family(case)
    s, t, path = lambda_family(fam, n)
    lo, hi = g(fam, n), g(fam, n + fam.J)
    if (lo + 1) * (hi + 1) % 2:
        raise InternalCheckError(f"{fam.name}: odd corner count target at n = {n}")
    count_goal = (lo + 1) * (hi + 1) // 2
    length_goal = lo + hi
    kb = fam.copies * fam.part
    checks = (
        ("path point count", path_lattice_count(path), count_goal),
        ("closed point count", _lambda_count_closed(fam, n, s, t), count_goal),
        ("path length", path_ell(_LAMBDA_REGION[fam.name], path), length_goal),
        ("closed length", fam.head * s - kb * t + fam.e_at(n), length_goal),
    )
    ok = True
    for label, got, want in checks:
        if got != want:
            ok = False
            if detail is not None:
                detail.append(f"{fam.name} n={n}: {label} {got} != {want}")
    return ok
