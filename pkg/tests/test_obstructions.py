import itertools
import random
from fractions import Fraction as Q

import pytest

from echstairs.core import parse_expansion, weight_expansion
from echstairs.obstructions import (
    ObstructiveClass,
    dbound_squared,
    enumerate_classes,
    exact_c_at,
    mu,
    singular_point_of,
)

BALL = parse_expansion("3")
E421 = parse_expansion("4;2,1")


def test_class_conditions_enforced():
    ObstructiveClass(1, (), (1, 1))
    with pytest.raises(ValueError):
        ObstructiveClass(1, (), (1, 1, 1))  # linear condition fails
    with pytest.raises(ValueError):
        ObstructiveClass(2, (), (2, 1, 1, 1))  # quadratic condition fails
    with pytest.raises(ValueError):
        ObstructiveClass(2, (), (1, 0, 1, 1, 1, 1))  # not nonincreasing
    with pytest.raises(ValueError):
        ObstructiveClass(0, (), ())
    # trailing zeros are conceptual padding, not data
    assert ObstructiveClass(1, (), (1, 1, 0, 0)).m == (1, 1)


def test_mu_examples():
    c11 = ObstructiveClass(1, (), (1, 1))
    assert mu(c11, BALL, 2) == Q(2, 3)
    assert mu(c11, BALL, 1) == Q(1, 3)
    # nonpositive denominator rejects the class for this target
    tight = parse_expansion("3;2,2")
    with pytest.raises(ValueError):
        mu(ObstructiveClass(1, (1, 1), ()), tight, 2)


def test_enumeration_examples():
    assert [str(c) for c in enumerate_classes(BALL, 1)] == ["(1; -; 1,1)"]
    twos = [c for c in enumerate_classes(BALL, 2) if c.d == 2]
    assert [c.m for c in twos] == [(1, 1, 1, 1, 1)]
    assert enumerate_classes(BALL, 0) == []
    for cls in enumerate_classes(E421, 6):
        assert sum(cls.m_tilde) + sum(cls.m) == 3 * cls.d - 1
        assert sum(v * v for v in cls.m_tilde + cls.m) == cls.d * cls.d + 1


def test_enumeration_with_query_point_filters():
    at_two = enumerate_classes(BALL, 5, a=2)
    assert all(mu(c, BALL, 2) ** 2 * 9 > 2 for c in at_two)
    assert ObstructiveClass(1, (), (1, 1)) in at_two
    # parallel partitioning returns the same set
    seq = enumerate_classes(E421, 7)
    par = enumerate_classes(E421, 7, workers=4)
    assert seq == par


def test_length_lemma_random_pairs():
    rng = random.Random(7)
    pool = [c for c in enumerate_classes(BALL, 9) if c.ell >= 2]
    vol = BALL.vol
    done = 0
    while done < 100:
        cls = rng.choice(pool)
        a = Q(rng.randint(1, 9), rng.randint(1, 4))
        if a < 1 or len(weight_expansion(a)) >= cls.ell:
            continue
        value = mu(cls, BALL, a)
        assert value * value * vol <= a
        done += 1


def test_degree_bound_random_points():
    rng = random.Random(11)
    classes = enumerate_classes(E421, 4)
    points = [Q(rng.randint(100, 900), 100) for _ in range(50)]
    for a in points:
        for cls in classes:
            ceiling = dbound_squared(E421, cls.d, a)
            if ceiling is None:
                continue
            value = mu(cls, E421, a)
            assert value * value <= ceiling


def test_ordered_arrangement_dominates():
    weights = weight_expansion(Q(7, 2))
    for cls in enumerate_classes(BALL, 4):
        if not 2 <= cls.ell <= 4:
            continue
        ordered = sum(v * w for v, w in zip(cls.m, weights))
        for perm in itertools.permutations(cls.m):
            assert sum(v * w for v, w in zip(perm, weights)) <= ordered


def test_exact_c_at():
    value, cert = exact_c_at(BALL, 2, 5)
    assert value == Q(2, 3)
    assert cert.kind == "class" and cert.exact
    assert cert.winner == ObstructiveClass(1, (), (1, 1))
    value, cert = exact_c_at(BALL, 1, 5)
    assert value == Q(1, 3)  # the surd sqrt(1/9) collapses to a rational
    assert cert.kind == "volume" and not cert.exact
    # near its accumulation point the pentagon target sits strictly
    # above the volume curve
    a = Q(517022, 100000)
    value, cert = exact_c_at(E421, a, 8)
    assert cert.kind == "class" and cert.exact
    assert value * value * 11 > a
    assert cert.as_dict()["class"]["d"] == cert.winner.d


def test_exact_c_at_matches_staircase_corners():
    from echstairs.staircases import corners

    for n in range(3):
        inner, outer = corners("(3)", n)
        if outer.x >= 1:
            value, cert = exact_c_at(BALL, outer.x, 8)
            assert (value, cert.exact) == (outer.y, True)
        value, _ = exact_c_at(BALL, inner.x, 8)
        assert value == inner.y


def test_singular_point():
    c11 = ObstructiveClass(1, (), (1, 1))
    assert singular_point_of(c11, BALL, (Q(3, 2), Q(5, 2))) == 2
    assert singular_point_of(c11, BALL, (4, 5)) is None
