import dataclasses
import threading
from fractions import Fraction as Q

import pytest

from echstairs.core import InternalCheckError, QuadraticSurd
from echstairs.staircases import (
    FAMILIES,
    Corner,
    corners,
    family,
    g,
    staircase_graph,
    verify_identities,
    verify_outer_obstruction,
    verify_structure,
)

# Frozen prefixes of the recurrence values, transcribed by hand from the
# seed blocks and checked once by running the two-term recurrence.
G_PREFIX = {
    "(3)": [2, 1, 1, 2, 5, 13, 34, 89],
    "(4;2,2)": [1, 1, 1, 3, 5, 17, 29, 99, 169],
    "(3;1)": [1, 1, 1, 1, 2, 4, 5, 11, 23, 29, 64, 134],
    "(3;1,1)": [1, 1, 1, 1, 2, 3, 4, 9, 14, 19],
    "(3;1,1,1)": [1, 1, 1, 2, 3, 7, 11, 26, 41],
    "(3;1,1,1,1)": [1, 2, 1, 3, 2, 7, 5, 18, 13, 47, 34, 123, 89],
}


def fibonacci(upto):
    seq = [0, 1]
    while len(seq) <= upto:
        seq.append(seq[-1] + seq[-2])
    return seq


def lucas(upto):
    seq = [2, 1]
    while len(seq) <= upto:
        seq.append(seq[-1] + seq[-2])
    return seq


def pell(upto):
    seq = [0, 1]
    while len(seq) <= upto:
        seq.append(2 * seq[-1] + seq[-2])
    return seq


def test_g_prefixes():
    for name, prefix in G_PREFIX.items():
        assert [g(name, n) for n in range(len(prefix))] == prefix
    assert g("(3)", 12) == 10946
    assert g("(3)", 14) == 75025


def test_classical_sequences_recovered():
    fib = fibonacci(40)
    luc = lucas(30)
    pel = pell(20)
    # ball case: odd-indexed Fibonacci numbers
    for n in range(2, 15):
        assert g("(3)", n) == fib[2 * n - 3]
    # square case: odd-indexed Pell numbers and their companions
    for m in range(1, 8):
        assert g("(4;2,2)", 2 * m) == pel[2 * m - 1]
        assert g("(4;2,2)", 2 * m + 1) == pel[2 * m] + pel[2 * m - 1]
    # five-cut case: the two Fibonacci-family strands interleave
    for m in range(1, 10):
        assert g("(3;1,1,1,1)", 2 * m) == fib[2 * m - 1]
    for m in range(0, 10):
        assert g("(3;1,1,1,1)", 2 * m + 1) == luc[2 * m]


def test_registry_constants():
    rows = {
        "(3)": (7, 2, 9),
        "(4;2,2)": (6, 2, 8),
        "(3;1)": (6, 3, 8),
        "(3;1,1)": (5, 3, 7),
        "(3;1,1,1)": (4, 2, 6),
        "(3;1,1,1,1)": (3, 2, 5),
    }
    for name, (K, J, vol) in rows.items():
        fam = FAMILIES[name]
        assert (fam.K, fam.J, fam.vol) == (K, J, vol)
        assert fam.per == fam.vol
        assert fam.y_limit * fam.y_limit * fam.vol == fam.a0


def test_accumulation_surds():
    assert FAMILIES["(3)"].a0 == QuadraticSurd(7, 3, 5, 2)
    assert FAMILIES["(4;2,2)"].a0 == QuadraticSurd(3, 2, 2, 1)
    assert FAMILIES["(3;1)"].a0 == QuadraticSurd(3, 2, 2, 1)
    assert FAMILIES["(3;1,1)"].a0 == QuadraticSurd(5, 1, 21, 2)
    assert FAMILIES["(3;1,1,1)"].a0 == QuadraticSurd(2, 1, 3, 1)
    assert FAMILIES["(3;1,1,1,1)"].a0 == QuadraticSurd(3, 1, 5, 2)


def test_family_lookup_normalizes():
    assert family("3;1,1") is FAMILIES["(3;1,1)"]
    assert family(FAMILIES["(3)"]) is FAMILIES["(3)"]
    with pytest.raises(ValueError):
        family("(5;2)")


def test_identity_suite():
    for name in FAMILIES:
        assert verify_identities(name, 200)


def test_identity_suite_catches_perturbation():
    fam = FAMILIES["(3)"]
    wrong = dataclasses.replace(fam, beta=(4,))
    assert not verify_identities(wrong, 10)


def test_registry_checksum_rejects_bad_constants():
    fam = FAMILIES["(3)"]
    with pytest.raises(InternalCheckError):
        dataclasses.replace(fam, K=8)
    with pytest.raises(InternalCheckError):
        dataclasses.replace(fam, seeds=(2, 1, 1))
    # the printed-but-inconsistent offset row for (3;1,1) cannot even be
    # constructed: it violates head*c - kb*d + vol*e = 0
    with pytest.raises(InternalCheckError):
        dataclasses.replace(FAMILIES["(3;1,1)"], e_row=(0, 1, 1))


def test_corner_examples():
    inner0, _ = corners("(3)", 0)
    assert (inner0.x, inner0.y) == (1, Q(1, 3))
    inner2, outer1 = corners("(3)", 2)[0], corners("(3)", 1)[1]
    assert inner2.x == Q(25, 4)
    assert (outer1.x, outer1.y) == (2, Q(2, 3))
    _, outer0 = corners("(4;2,2)", 0)
    assert (outer0.x, outer0.y) == (1, Q(1, 2))


def test_corner_validation():
    with pytest.raises(ValueError):
        Corner(Q(2), Q(1, 2), "sideways", 0)
    with pytest.raises(InternalCheckError):
        Corner(Q(2), Q(3, 2), "inner", 0)


def test_volume_curve_dichotomy():
    # J=2 inner corners sit exactly on y^2 vol = x; J=3 ones never do
    for name in ("(3)", "(4;2,2)", "(3;1,1,1)", "(3;1,1,1,1)"):
        vol = FAMILIES[name].vol
        for n in range(13):
            inner, _ = corners(name, n)
            assert inner.y * inner.y * vol == inner.x
    for name in ("(3;1)", "(3;1,1)"):
        vol = FAMILIES[name].vol
        for n in range(13):
            inner, _ = corners(name, n)
            assert inner.y * inner.y * vol != inner.x


def test_structure_convergence():
    for name in FAMILIES:
        assert verify_structure(name, 20, Q(1, 10**6))


def test_graph_values():
    graph = staircase_graph("(3)", Q(13, 2))
    assert graph.value_at(1) == Q(1, 3)
    assert graph.value_at(3) == Q(2, 3)
    assert graph.value_at(Q(9, 2)) == Q(3, 4)
    assert graph.value_at(Q(25, 4)) == Q(5, 6)
    assert graph(2) == Q(2, 3)
    # the ball graph starts at the inner corner (1, 1/3); the square's
    # zeroth outer corner lands exactly at x = 1 and is kept
    assert graph.corner_list[0].kind == "inner"
    square = staircase_graph("(4;2,2)", 5)
    assert square.corner_list[0].kind == "outer"
    assert square.value_at(1) == Q(1, 2)


def test_graph_domain_checks():
    with pytest.raises(ValueError):
        staircase_graph("(3)", 8)
    clipped = staircase_graph("(3)", 8, clip=True)
    assert clipped.value_at(Q(27, 4)) == Q(13, 15)
    assert clipped.value_at(Q(34, 5)) == Q(34, 39)
    with pytest.raises(ValueError):
        clipped.value_at(7)  # beyond the accumulation point
    with pytest.raises(ValueError):
        clipped.value_at(Q(1, 2))
    with pytest.raises(ValueError):
        staircase_graph("(3)", Q(1, 2))


def test_graph_monotone_dense():
    for name, stop in (("(3;1)", Q(11, 2)), ("(3;1,1,1,1)", Q(13, 5))):
        graph = staircase_graph(name, stop)
        prev = Q(0)
        for i in range(200):
            a = 1 + (stop - 1) * i / 199
            val = graph.value_at(a)
            assert val >= prev
            assert val <= 1
            prev = val


def test_outer_obstruction_small():
    for name in FAMILIES:
        for n in range(9):
            assert verify_outer_obstruction(name, n)


def test_g_extension_is_thread_safe():
    fam = FAMILIES["(3;1)"]
    results = []

    def worker():
        results.append(g(fam, 400))

    threads = [threading.Thread(target=worker) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(set(results)) == 1
    assert results[0] == g(fam, 400)
