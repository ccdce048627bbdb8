import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from loev.gdelta import (
    DomainError,
    GDeltaDomain,
    bound_metric,
    distance_to_interval_complement,
    distance_to_points,
    euclidean,
    gdelta_premetric,
    level_set_probe,
    perturbed_minimize,
    phi,
    series_equivalence_check,
)
from loev.semicomplete import BELOW, EXCEEDED, SequenceSpec
from loev.spaces import abs_difference, g_length

HALF = GDeltaDomain(abs_difference, [distance_to_points([0.5], abs_difference)])


def g(x, y):
    return gdelta_premetric(HALF, x, y).value


def test_bound_metric():
    assert bound_metric(0) == 0
    assert bound_metric(1) == 0.5
    assert bound_metric(0.25) == 0.2
    assert bound_metric(math.inf) == 1
    with pytest.raises(ValueError):
        bound_metric(-1)


def test_phi_values():
    assert phi(HALF, 1, 1.0) == pytest.approx(3, abs=1e-15)
    assert phi(HALF, 1, 0.5) == math.inf
    assert phi(HALF, 1, 0.75) == 5.0


def test_phi_empty_closed_set():
    assert phi(HALF, 2, 0.5) == 0
    with pytest.raises(IndexError):
        phi(HALF, 33, 0.1)


def test_premetric_diagonal():
    assert g(0.3, 0.3) == 0


def test_premetric_worked_value():
    expected = 0.2 + 0.5 * (2 / 3)
    value = gdelta_premetric(GDeltaDomain(abs_difference, HALF.closed_sets, depth=1), 1.0, 0.75)
    assert value.value == pytest.approx(expected, abs=1e-12)
    assert value.value == pytest.approx(0.5333333333333333, abs=1e-12)
    assert value.truncation_bound == 0.5
    # empty F_n past the first add nothing
    assert g(1.0, 0.75) == pytest.approx(expected, abs=1e-12)


def test_premetric_outside_domain():
    with pytest.raises(DomainError):
        gdelta_premetric(HALF, 0.5, 0.2)


def test_callable_closed_family():
    dom = GDeltaDomain(abs_difference, lambda n: distance_to_points([1 / (n + 1)], abs_difference), depth=8)
    assert dom.contains(0.7) and not dom.contains(1 / 3)
    assert gdelta_premetric(dom, 0.7, 0.9).value > abs(0.7 - 0.9) / 1.2


points = st.floats(0, 1).filter(lambda x: abs(x - 0.5) > 1e-3)


@given(points, points)
def test_premetric_symmetric_and_dominates_bounded_metric(x, y):
    assert g(x, y) == g(y, x)
    assert g(x, y) >= bound_metric(abs(x - y))
    if x != y:
        assert g(x, y) > 0


def test_blow_up_near_the_boundary():
    xs = [0.5 + 2.0**-i for i in range(1, 31)]
    # direct partial sums: phi(x_i) = 2**i + 1, so t = 2**i and each term adds ~1/2
    direct = 0.0
    for a, b in zip(xs, xs[1:]):
        t = abs((1 / bound_metric(b - 0.5)) - (1 / bound_metric(a - 0.5)))
        direct += bound_metric(abs(b - a)) + 0.5 * t / (1 + t)
    assert direct > 10
    assert g_length(xs, g) == pytest.approx(direct, rel=1e-12)
    assert g_length(xs, g) > 10


def test_series_zero():
    rep = series_equivalence_check([0.0] * 10, 10, 1)
    assert rep.sum_raw == rep.sum_transformed == 0


def test_series_constant():
    rep = series_equivalence_check(lambda i: 1.0, 100, 10)
    assert (rep.sum_raw, rep.sum_transformed) == (100, 50)
    assert rep.verdict_raw == rep.verdict_transformed == EXCEEDED


def test_series_geometric():
    rep = series_equivalence_check(lambda i: 2.0**-i, 50, 10)
    exact = sum(Fraction(1, 2**i) / (1 + Fraction(1, 2**i)) for i in range(50))
    assert rep.sum_raw == pytest.approx(2, abs=1e-14)
    assert rep.sum_transformed == pytest.approx(float(exact), abs=1e-14)
    assert round(rep.sum_transformed, 4) == 1.2645
    assert rep.verdict_raw == rep.verdict_transformed == BELOW


@given(st.lists(st.floats(0, 1e6), min_size=1, max_size=40))
def test_series_transformed_never_exceeds_raw(terms):
    assert series_equivalence_check(terms, len(terms), 1).consistent


def test_series_rejects_negative_terms():
    with pytest.raises(ValueError):
        series_equivalence_check([1.0, -1.0], 2, 1)


def test_level_set_limit_inside():
    seq = SequenceSpec(lambda i: 5 / 6 + 2.0**-i / 10, 40)
    rep = level_set_probe(HALF, 1, 4, seq, limit=5 / 6)
    assert rep.passed and rep.precondition_violations == ()


def test_level_set_constant_sequence():
    assert level_set_probe(HALF, 1, 4, SequenceSpec(lambda i: 0.9, 5)).passed


def test_level_set_sequence_approaching_boundary():
    rep = level_set_probe(HALF, 1, 4, SequenceSpec(lambda i: 0.5 + 2.0**-(i + 1), 12))
    assert not rep.passed and rep.precondition_violations


def test_perturbed_minimize_grid():
    res = perturbed_minimize(HALF, [0.1, 0.2, 0.3, 0.4], lambda x: x, 1)
    assert res.point == 0
    grid = [0.1, 0.2, 0.3, 0.4]
    brute = min(grid[x] + g(grid[0], grid[x]) - grid[0] for x in range(1, 4))
    assert res.residual == brute >= 0


def test_perturbed_minimize_singleton():
    res = perturbed_minimize(HALF, [0.7], [3.0], 0.5)
    assert res.point == 0 and res.residual == math.inf


def test_perturbed_minimize_constant():
    grid = [0.1, 0.3, 0.9]
    res = perturbed_minimize(HALF, grid, [1.0] * 3, 0.5, x0=1)
    assert res.point == 1
    assert res.residual == min(1.0 + 0.5 * g(0.3, x) - 1.0 for x in (0.1, 0.9))
    assert res.residual == pytest.approx(0.5 * g(0.3, 0.1), rel=1e-14)
    assert res.residual > 0


def test_perturbed_minimize_rejects_point_outside():
    with pytest.raises(DomainError):
        perturbed_minimize(HALF, [0.1, 0.5], [0, 0], 1)


def test_interval_complement_and_euclidean():
    dist = distance_to_interval_complement(0, 1)
    assert dist(0.25) == 0.25 and dist(2) == 0
    assert euclidean(3, 0) == 3.0
    assert euclidean((0, 3), (4, 0)) == 5.0
