import random
from fractions import Fraction as Q

import pytest

from echstairs._geom import edge_cycle_key
from echstairs.capacities import ech_convex_toric
from echstairs.core import InternalCheckError, negative_weight_expansion, parse_expansion
from echstairs.latticepaths import (
    FANO_DOMAINS,
    REFLEXIVE_DOMAINS,
    ck_table,
    ck_via_paths,
    enumerate_reflexive,
    fano_catalogue,
    lambda_family,
    path_ell,
    path_lattice_count,
    path_svg,
    verify_lambda,
)

BALL3 = ((0, 0), (3, 0), (0, 3))
SQUARE = ((0, 0), (2, 0), (2, 2), (0, 2))


def region_point_count(path):
    """Oracle: count lattice points enclosed by the path and the axes
    by testing every grid point against the closed region's edges."""
    cyc = list(path)
    if cyc[0] != (0, 0):
        cyc = [(0, 0)] + cyc
    if cyc[-1] != (0, 0):
        cyc = cyc + [(0, 0)]
    xmax = max(x for x, _ in cyc)
    ymax = max(y for _, y in cyc)
    count = 0
    for px in range(xmax + 1):
        for py in range(ymax + 1):
            inside = True
            for (ax, ay), (bx, by) in zip(cyc, cyc[1:]):
                if (bx - ax) * (py - ay) - (by - ay) * (px - ax) > 0:
                    inside = False
                    break
            count += inside
    return count


def brute_ellipsoid(a, b, count):
    cut = count * min(a, b)
    vals = sorted(
        m * a + n * b
        for m in range(count + 2)
        for n in range(count + 2)
        if m * a + n * b <= cut
    )
    return vals[:count]


def polydisk_capacity(a, b, k):
    best = None
    for m in range(k + 2):
        for n in range(k + 2):
            if (m + 1) * (n + 1) >= k + 1:
                v = a * m + b * n
                best = v if best is None else min(best, v)
    return best


def test_lattice_count_examples():
    assert path_lattice_count([(0, 2), (2, 0)]) == 6
    assert path_lattice_count([(0, 0)]) == 1
    assert path_lattice_count([(0, 0), (2, 0)]) == 3
    assert path_lattice_count([(0, 3), (3, 0)]) == 10
    # ascending first edge: hull of (0,0),(0,1),(1,2),(2,0) plus interior (1,1)
    assert path_lattice_count([(0, 1), (1, 2), (2, 0)]) == 6


def test_lattice_count_against_direct_enumeration():
    paths = [
        [(0, 2), (2, 0)],
        [(0, 1), (1, 2), (2, 0)],
        [(0, 3), (1, 3), (2, 2), (3, 0)],
        [(0, 0), (1, 0)],
        [(0, 5), (1, 3), (2, 0)],
        [(0, 2), (1, 2), (3, 1), (4, 0)],
        [(0, 1), (1, 3), (2, 3), (4, 0)],
    ]
    for p in paths:
        assert path_lattice_count(p) == region_point_count(p), p


def test_path_validation():
    with pytest.raises(ValueError):
        path_lattice_count([(1, 1), (2, 0)])  # starts off the y-axis
    with pytest.raises(ValueError):
        path_lattice_count([(0, 2), (1, 1)])  # ends off the x-axis
    with pytest.raises(ValueError):
        path_lattice_count([(0, 2), (Q(1, 2), 1), (2, 0)])
    with pytest.raises(ValueError):
        # (1,1) then (1,-3) then (1,1): rotation reverses
        path_lattice_count([(0, 1), (1, 2), (2, 0), (3, 1)])


def test_path_ell_examples():
    assert path_ell(BALL3, [(0, 1), (1, 0)]) == 3
    assert path_ell(BALL3, [(0, 0)]) == 0
    assert path_ell(SQUARE, [(0, 2), (1, 1), (2, 0)]) == 8
    assert path_ell(SQUARE, [(0, 1), (1, 1), (2, 0)]) == 6
    # the support point is taken over the region, not the path
    assert path_ell(((0, 0), (2, 0), (1, 2), (0, 1)), [(0, 1), (1, 2), (2, 0)]) == 5


def test_ball_paths_match_ellipsoid_multiset():
    vals = ck_table(BALL3, 12)
    assert vals == brute_ellipsoid(3, 3, 13)
    assert ck_via_paths(BALL3, 2) == 3


def test_ellipsoid_paths_match_multiset():
    assert ck_table(((0, 0), (3, 0), (0, 2)), 10) == brute_ellipsoid(3, 2, 11)
    assert ck_table(((0, 0), (4, 0), (0, 2)), 10) == brute_ellipsoid(4, 2, 11)


def test_square_paths_match_polydisk():
    vals = ck_table(SQUARE, 12)
    assert vals == [polydisk_capacity(2, 2, k) for k in range(13)]
    # k = 4 needs the diagonal direction (1,-1); edges parallel to the
    # square's own sides only reach 8
    assert vals[4] == 6
    assert ck_via_paths(SQUARE, 3) == 4


def test_ck_table_is_nondecreasing():
    for om in (BALL3, SQUARE, ((0, 0), (2, 0), (2, 1), (0, 3))):
        vals = ck_table(om, 10)
        assert vals[0] == 0
        assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_dual_route_on_the_twelve_domains():
    for name, verts, expstr in fano_catalogue():
        exp = negative_weight_expansion([(Q(x), Q(y)) for x, y in verts])
        assert str(exp) == f"({expstr})", name
        pipe = ech_convex_toric(exp, 10)
        assert [Q(v, pipe.den) for v in pipe.nums] == ck_table(verts, 9), name


def test_dual_route_needs_normal_position():
    # same class as the trapezoid, chopped at the origin instead: the
    # path minimum no longer computes the ball-difference capacities
    chopped = ((1, 0), (3, 0), (0, 3), (0, 1))
    assert str(negative_weight_expansion(chopped)) == "(3;1)"
    pipe = ech_convex_toric(parse_expansion("(3;1)"), 2)
    assert Q(pipe.nums[1], pipe.den) == 2
    assert ck_via_paths(chopped, 1) == 3


def test_enumeration_finds_sixteen_classes():
    reps = enumerate_reflexive()
    assert len(reps) == 16
    keys = {edge_cycle_key(p) for p in reps}
    assert keys == {edge_cycle_key(v) for v in REFLEXIVE_DOMAINS.values()}


def test_catalogue_entries_are_reflexive_and_distinct():
    from echstairs._geom import interior_lattice_count

    keys = set()
    for name, verts in REFLEXIVE_DOMAINS.items():
        assert interior_lattice_count(verts) == 1, name
        keys.add(edge_cycle_key(verts))
    assert len(keys) == len(REFLEXIVE_DOMAINS)


def test_canonical_key_ignores_placement():
    rng = random.Random(23)
    polys = list(REFLEXIVE_DOMAINS.values())
    for verts in polys:
        key = edge_cycle_key(verts)
        # transpose (an orientation-reversing map)
        assert edge_cycle_key(tuple((y, x) for x, y in reversed(verts))) == key
        for _ in range(4):
            a, b = rng.randint(-2, 2), rng.randint(-1, 1)
            image = tuple((x + a * y, b * x + (1 + a * b) * y) for x, y in verts)
            assert edge_cycle_key(image) == key
    assert edge_cycle_key(((1, 0), (3, 0), (0, 3), (0, 1))) == edge_cycle_key(
        REFLEXIVE_DOMAINS["trapezoid"]
    )


def test_fano_catalogue_multiplicities():
    assert len(FANO_DOMAINS) == 12
    counts = {}
    for _, _, expstr in fano_catalogue():
        counts[expstr] = counts.get(expstr, 0) + 1
    assert counts == {
        "3": 1,
        "4;2,2": 2,
        "3;1": 2,
        "3;1,1": 2,
        "3;1,1,1": 4,
        "3;1,1,1,1": 1,
    }


def test_svg_smoke():
    text = path_svg(SQUARE, [(0, 2), (1, 1), (2, 0)])
    assert text.startswith("<svg")
    assert "polygon" in text and "polyline" in text


def test_lambda_family_small_witnesses():
    assert lambda_family("(3)", 0) == (1, 0, [(0, 1), (1, 0)])
    assert lambda_family("(3;1)", 2) == (2, 1, [(0, 2), (1, 1), (1, 0)])
    # the first five-cut witness needs an ascending edge
    assert lambda_family("(3;1,1,1,1)", 1) == (3, 1, [(0, 1), (1, 2), (2, 0)])
    # degenerate small paths collapse to a segment after deduplication
    assert lambda_family("(3;1,1,1)", 0)[2] == [(0, 1), (0, 0)]
    assert lambda_family("(4;2,2)", 0)[2] == [(0, 0), (1, 0)]
    assert lambda_family("(3;1,1,1)", 3) == (4, 1, [(0, 3), (1, 3), (2, 2), (3, 0)])


def test_verify_lambda_all_families():
    from echstairs.staircases import FAMILIES

    for name in FAMILIES:
        detail = []
        for n in range(26):
            assert verify_lambda(name, n, detail=detail)
        assert detail == []


def test_verify_lambda_reports_failures():
    import dataclasses

    from echstairs.staircases import FAMILIES

    base = FAMILIES["(3;1)"]
    # keep the registry checksum happy (head*c - kb*d + vol*e = 0) while
    # shifting t_0 and the closed length off the masters
    bent = dataclasses.replace(
        base, d_row=(-2, -3, 3, -6, 3, -3), e_row=(-1, 0, 0, 0, 0, 0)
    )
    detail = []
    assert not verify_lambda(bent, 0, detail=detail)
    assert detail and all("!=" in line for line in detail)
    # a perturbation that breaks integrality of s_n is an internal error
    skew = dataclasses.replace(base, c_row=(-2, -1, 1, -2, 1, -1), d_row=(-6, -3, 3, -6, 3, -3))
    with pytest.raises(InternalCheckError):
        lambda_family(skew, 0)
