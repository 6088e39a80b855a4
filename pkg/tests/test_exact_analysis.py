import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import eta_dense, eta_fraction_dense

from diagdesign.bitseq import collision_pattern, enumerate_classes, num_classes
from diagdesign.exact_analysis import (
    CollisionPattern,
    ExactDistance,
    collision_patterns,
    eta_asymptotic,
    eta_by_enumeration,
    eta_exact,
    mixing_curve,
    mixing_optimum_closed_form,
    partitions,
    pattern_class_count,
    required_length,
)


def test_pattern_counts_examples():
    assert pattern_class_count(1, 2, CollisionPattern((1, 1))) == 1
    assert pattern_class_count(1, 2, CollisionPattern((2,))) == 2
    assert pattern_class_count(5, 4, CollisionPattern((4,))) == 32


@pytest.mark.parametrize("n", range(1, 7))
@pytest.mark.parametrize("t", range(1, 7))
def test_pattern_counts_sum_to_class_count(n, t):
    assert sum(pattern_class_count(n, t, p) for p in collision_patterns(t)) == num_classes(n, t)


@pytest.mark.parametrize("n,t", [(2, 3), (3, 3), (2, 5)])
def test_pattern_counts_match_enumeration(n, t):
    seen = {}
    for c in enumerate_classes(n, t):
        seen[c.pattern] = seen.get(c.pattern, 0) + 1
    assert seen == {p.parts: pattern_class_count(n, t, p) for p in collision_patterns(t) if p.part_count <= 1 << n}


def test_partition_counts():
    assert [sum(1 for _ in partitions(t)) for t in range(1, 11)] == [1, 2, 3, 5, 7, 11, 15, 22, 30, 42]


def test_eta_examples():
    assert eta_exact(1, 2).value == Fraction(1, 3)
    assert 2 * abs(Fraction(1, 3) - Fraction(1, 4)) + abs(Fraction(1, 3) - Fraction(1, 2)) == Fraction(1, 3)
    assert eta_exact(4, 1).value == 0
    assert abs(1024 * eta_exact(10, 2).value - 2) < Fraction(2, 100)


def test_eta_asymptotic_examples():
    assert eta_asymptotic(10, 2) == Fraction(2, 1024)
    assert eta_asymptotic(5, 3) == Fraction(6, 32)
    assert eta_asymptotic(7, 1) == 0


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("t", [1, 2, 3, 4])
def test_eta_paths_agree(n, t):
    assert eta_exact(n, t).value == eta_by_enumeration(n, t).value == eta_fraction_dense(n, t)


@pytest.mark.parametrize("n,t", [(1, 2), (2, 2), (1, 3), (2, 3), (3, 2)])
def test_eta_matches_dense_trace_norm(n, t):
    assert float(eta_exact(n, t)) == pytest.approx(eta_dense(n, t), abs=1e-10)


def test_exact_distance_range():
    with pytest.raises(ValueError):
        ExactDistance(Fraction(3), 1, 2)


def test_eta_convergence_t2():
    errs = [abs((1 << n) * eta_exact(n, 2).value - 2) for n in range(6, 15)]
    for a, b in zip(errs, errs[1:]):
        assert b < a and b / a <= Fraction(6, 10)


@given(st.integers(1, 12), st.integers(2, 6))
def test_mixing_minimiser_is_closed_form(n, t):
    curve = mixing_curve(n, t)
    assert curve.p_star == mixing_optimum_closed_form(n, t)
    assert curve(1) == eta_exact(n, t).value


def test_mixing_examples():
    curve = mixing_curve(3, 2)
    assert curve.p_star == Fraction(8, 9)
    assert curve.d_at_p_star < curve(1)


@pytest.mark.parametrize("n,t", [(3, 2), (4, 3), (5, 2)])
def test_mixing_convex_piecewise_linear(n, t):
    curve = mixing_curve(n, t)
    assert list(curve.slopes) == sorted(curve.slopes)
    grid = [Fraction(i, 64) for i in range(65)]
    assert all(curve(p) >= curve.d_at_p_star for p in grid)
    for (lo, hi), slope in zip(zip(curve.breakpoints, curve.breakpoints[1:]), curve.slopes):
        mid = (lo + hi) / 2
        assert curve(mid) - curve(lo) == slope * (mid - lo)


def test_required_length():
    assert required_length(float(eta_exact(10, 2).value), 10, 2, 1.5) == 0
    assert required_length(2**-20, 10, 2, 1.0) == pytest.approx(11.0)
    # eta/2 costs one halving on top of the offset between eta and its leading term
    n, t, alpha = 20, 2, 1.7
    eta = eta_exact(n, t).value
    offset = math.log2(eta_asymptotic(n, t) / eta)
    assert required_length(float(eta / 2), n, t, alpha) == pytest.approx(alpha * (1 + offset), rel=1e-12)
    assert required_length(float(eta / 2), n, t, alpha) == pytest.approx(alpha, rel=1e-5)


def test_collision_pattern_of_classes():
    assert collision_pattern((3, 1, 3, 3)) == (3, 1)
    assert CollisionPattern((1, 3)).parts == (3, 1)
    assert CollisionPattern((2, 1)).class_size == 3
