from fractions import Fraction as Q

import pytest

from echstairs.core import QuadraticSurd
from echstairs.embedfn import (
    accumulation_point,
    detect_corners,
    fit_linear_recurrence,
    sample_embedding_function,
    staircase_obstruction,
)
from echstairs.obstructions import exact_c_at
from echstairs.staircases import family, staircase_graph

# Accumulation points of the six staircase families, frozen as exact
# surds.  (4;2,1) accumulates too, but outside the staircase regime.
ACC_POINTS = {
    "(3)": QuadraticSurd(7, 3, 5, 2),
    "(4;2,2)": QuadraticSurd(3, 2, 2, 1),
    "(3;1)": QuadraticSurd(3, 2, 2, 1),
    "(3;1,1)": QuadraticSurd(5, 1, 21, 2),
    "(3;1,1,1)": QuadraticSurd(2, 1, 3, 1),
    "(3;1,1,1,1)": QuadraticSurd(3, 1, 5, 2),
    "(4;2,1)": QuadraticSurd(59, 9, 37, 22),
}


def test_ball_samples():
    samples = sample_embedding_function("(3)", 1, 2, Q(1, 2), 600)
    assert [(x.a, x.value) for x in samples] == [
        (1, Q(1, 3)),
        (Q(3, 2), Q(1, 2)),
        (2, Q(2, 3)),
    ]
    assert samples[2].witness_k == 2
    assert all(x.certified for x in samples)


def test_sampling_domain_checks():
    with pytest.raises(ValueError):
        sample_embedding_function("(3)", Q(1, 2), 2, Q(1, 4), 100)
    with pytest.raises(ValueError):
        sample_embedding_function("(3)", 2, 2, Q(1, 4), 100)
    with pytest.raises(ValueError):
        sample_embedding_function("(3)", 1, 2, 0, 100)
    with pytest.raises(ValueError):
        sample_embedding_function("(3)", 1, 2, Q(1, 4), 1)


def test_accumulation_points():
    for case, expected in ACC_POINTS.items():
        assert accumulation_point(case) == expected
    # a0 + 1/a0 = K pins each root to its recurrence constant.
    for case in ("(3)", "(4;2,2)", "(3;1)", "(3;1,1)", "(3;1,1,1)", "(3;1,1,1,1)"):
        a0 = accumulation_point(case)
        assert a0 + a0.inverse() == family(case).K
    # K = 2 degenerates to a rational double root, K < 2 to none.
    assert accumulation_point("(3;1,1,1,1,1)") == QuadraticSurd(1, 0, 5, 1)
    assert accumulation_point("(3;1,1,1,1,1,1)") is None


def test_lower_bound_sound_and_sharp():
    graph = staircase_graph("(3)", Q(27, 4))
    samples = sample_embedding_function("(3)", 1, Q(27, 4), Q(1, 20), 2000)
    for x in samples:
        assert x.value <= graph.value_at(x.a)
    sharp = {x.a: x.value for x in samples}
    assert sharp[2] == Q(2, 3)
    assert sharp[4] == Q(2, 3)
    assert sharp[5] == Q(5, 6)
    assert sharp[Q(25, 4)] == Q(5, 6)
    assert sharp[Q(13, 2)] == graph.value_at(Q(13, 2)) == Q(13, 15)


def test_monotone_and_subscaling():
    samples = sample_embedding_function("(4;2,2)", 1, 5, Q(1, 6), 400)
    values = [x.value for x in samples]
    assert values == sorted(values)
    # c(t a) <= t c(a): E(1, ta) sits inside t E(1, a) for t >= 1.
    at = {x.a: x.value for x in sample_embedding_function("(4;2,2)", 1, 8, Q(1, 2), 400)}
    for a in (Q(3, 2), 2, Q(5, 2), 3, 4):
        assert at[2 * a] <= 2 * at[a]


def test_obstruction_bound_dominates_samples():
    samples = {
        x.a: x.value
        for x in sample_embedding_function("(3)", 2, 4, Q(1, 2), 2000)
    }
    for a, value in samples.items():
        best, cert = exact_c_at("(3)", a, 8)
        assert best >= value
    # A class backs the shelf; at a = 4 the shelf meets the volume
    # curve, which takes over exactly there.
    assert exact_c_at("(3)", 2, 8)[1].kind == "class"
    assert exact_c_at("(3)", 4, 8)[1].kind == "volume"


def test_staircase_obstruction_gap():
    report = staircase_obstruction("(4;2,1)", 3000, Q(1, 100))
    assert report.gap_positive
    assert report.a0 == ACC_POINTS["(4;2,1)"]
    assert report.volume_value == QuadraticSurd(9, 1, 37, 22)
    assert report.lower_bound > report.volume_value
    d = report.as_dict()
    assert d["gap_positive"] is True
    assert d["a0"] == "(59+9*sqrt(37))/22"


def test_no_gap_on_staircase_families():
    for case in ("(3)", "(4;2,2)"):
        report = staircase_obstruction(case, 3000, Q(1, 100))
        assert not report.gap_positive


def test_detect_corners_on_ball():
    samples = sample_embedding_function("(3)", 1, Q(69, 10), Q(1, 100), 3000)
    found = detect_corners(samples, Q(1, 10))
    assert [(a, kind) for a, _, kind in found] == [
        (2, "outer"),
        (4, "inner"),
        (5, "outer"),
        (Q(25, 4), "inner"),
        (Q(13, 2), "outer"),
        (Q(169, 25), "inner"),
        (Q(34, 5), "outer"),
    ]
    assert found[0][1] == Q(2, 3)
    assert found[4][1] == Q(13, 15)


def test_detect_corners_guards():
    flat = sample_embedding_function("(3)", 2, 3, Q(1, 10), 50)
    assert detect_corners(flat[:6], Q(1, 10)) == []  # shelf has no corners
    assert detect_corners(flat[:2], Q(1, 10)) == []  # too short to bend
    with pytest.raises(ValueError):
        detect_corners([flat[0], flat[1], flat[4]], Q(1, 10))
    with pytest.raises(ValueError):
        detect_corners(flat, -1)


def test_fit_linear_recurrence():
    assert fit_linear_recurrence([4, 4, 4, 4, 4]) == (1, (Q(1),))
    assert fit_linear_recurrence([1, 2, 4, 8, 16, 32]) == (1, (Q(2),))
    # The one-step relation s(n+2) = 3 s(n+1) - s(n) already generates
    # this prefix, so the minimal order is 2 even though the family
    # recurrence is stated at order 4.
    assert fit_linear_recurrence([2, 1, 1, 2, 5, 13, 34, 89]) == (2, (Q(-1), Q(3)))
    three_one = [1, 1, 1, 1, 2, 4, 5, 11, 23, 29, 64, 134, 169, 373]
    assert fit_linear_recurrence(three_one) == (
        6,
        (Q(-1), Q(0), Q(0), Q(6), Q(0), Q(0)),
    )
    assert fit_linear_recurrence([1, 2, 1, 3, 2, 7, 5, 18, 13, 47, 34, 123, 89]) == (
        4,
        (Q(-1), Q(0), Q(3), Q(0)),
    )
    assert fit_linear_recurrence([1, 2, 4, 9]) is None
    assert fit_linear_recurrence(three_one, max_order=3) is None
