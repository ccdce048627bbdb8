import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loev.errors import HypothesisViolation, LongOrbitError
from loev.orbit_engine import OrbitBudget
from loev.principles import (
    CaristiInstance,
    EkelandCertificate,
    FabianPreissInstance,
    OettliInstance,
    caristi_fixed_point,
    check_caristi_condition,
    check_fabian_preiss_hypothesis,
    check_oettli_hypothesis,
    check_takahashi_condition,
    default_budget,
    ekeland_metric,
    ekeland_premetric,
    fabian_preiss,
    oettli_thera,
    takahashi_minimize,
    verify_certificate,
)
from loev.spaces import FiniteSpace

from oracles import ekeland_points_metric, ekeland_points_premetric, random_metric

LINE = [[0, 1, 2], [1, 0, 1], [2, 1, 0]]
INF = math.inf


# ---- Ekeland, premetric form ----------------------------------------------


def test_premetric_singleton():
    cert = ekeland_premetric([5.0], [[0]], 0.3, 0)
    assert cert.point == 0 and cert.domination_residual == INF and cert.certified


def test_premetric_asymmetric_two_points():
    cert = ekeland_premetric([1, 0], [[0, 1], [3, 0]], 1, 0)
    assert cert.point == 0
    assert cert.domination_residual == 2
    assert cert.orbit.points == (0,)


def test_premetric_line():
    cert = ekeland_premetric([2, 1, 0], LINE, 0.5, 0)
    assert cert.point == 2
    assert cert.domination_residual == min(2 + 1 - 0, 1 + 0.5 - 0) == 1.5
    assert cert.point in ekeland_points_premetric([2, 1, 0], LINE, 0.5)


def test_premetric_rejects_start_outside_domain():
    with pytest.raises(ValueError, match="domain"):
        ekeland_premetric([INF, 0], [[0, 1], [1, 0]], 1, 0)


def test_premetric_rejects_bad_eps_and_start():
    with pytest.raises(ValueError):
        ekeland_premetric([1, 0], [[0, 1], [1, 0]], 0, 0)
    with pytest.raises(IndexError):
        ekeland_premetric([1, 0], [[0, 1], [1, 0]], 1, 5)


def test_premetric_skips_infinite_points():
    cert = ekeland_premetric([3, INF, 0], LINE, 1, 0)
    assert cert.point == 2
    assert cert.point_residuals[1] == INF


def test_tiny_budget_reports_long_orbit():
    # the far jump 0 -> 1 leaves one more step to reach the minimum
    g = [[0, 5, 1], [5, 0, 1], [1, 1, 0]]
    assert ekeland_premetric([2, 1, 0], g, 0.1, 0).orbit.points == (0, 1, 2)
    with pytest.raises(LongOrbitError, match="long orbit: hypotheses violated or budget too small"):
        ekeland_premetric([2, 1, 0], g, 0.1, 0, OrbitBudget(max_steps=1))


def test_default_budget():
    b = default_budget(4.0, 0.5, 6)
    assert b.max_steps == 7 and b.length_threshold == 17.0
    assert default_budget(INF, 1.0, 2).length_threshold == INF


# ---- Ekeland, metric form -------------------------------------------------


def test_metric_constant_objective():
    cert = ekeland_metric([1, 1, 1], LINE, 0.25, 1)
    assert cert.point == 1
    assert cert.descent_residual == 0
    assert cert.domination_residual == 0.25 * 1 > 0


def test_metric_line_decreasing():
    cert = ekeland_metric([2, 1, 0], LINE, 0.5, 0)
    assert cert.point == 2
    assert cert.descent_residual == 1.0
    assert cert.point_residuals == (3.0, 1.5, None)
    assert cert.domination_residual == 1.5
    assert cert.certified


def test_metric_line_increasing():
    cert = ekeland_metric([0, 1, 2], LINE, 0.5, 0)
    assert cert.point == 0 and cert.descent_residual == 0


def test_metric_rejects_non_metric():
    with pytest.raises(ValueError, match="QuasiMetric"):
        ekeland_metric([1, 0], [[0, 1], [3, 0]], 1, 0)


def test_metric_accepts_finite_space():
    space = FiniteSpace.from_table(["a", "b", "c"], LINE)
    assert ekeland_metric([2, 1, 0], space, 0.5, 0).point == 2


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 8), st.sampled_from([0.25, 0.5, 1.0, 2.0]))
def test_metric_scaling_invariance(seed, n, lam):
    rng = np.random.default_rng(seed)
    d = random_metric(rng, n)
    f = [int(v) for v in rng.integers(0, 21, n)]
    x0 = int(rng.integers(n))
    base = ekeland_metric(f, d, lam, x0)
    for c in (2.0, 0.5, 8.0):
        scaled = ekeland_metric([c * v for v in f], d, c * lam, x0)
        assert scaled.point == base.point
        assert scaled.orbit.points == base.orbit.points


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 9), st.sampled_from([0.125, 0.5, 1.0, 1.5]))
def test_metric_point_is_brute_force_ekeland_point(seed, n, lam):
    rng = np.random.default_rng(seed)
    d = random_metric(rng, n)
    f = [int(v) for v in rng.integers(0, 21, n)]
    x0 = int(rng.integers(n))
    cert = ekeland_metric(f, d, lam, x0)
    assert cert.point in ekeland_points_metric(f, d, lam, x0)
    assert cert.orbit.length <= (f[x0] - min(f)) / lam


# ---- independent verification --------------------------------------------


def test_verify_matches_solver():
    cert = ekeland_metric([2, 1, 0], LINE, 0.5, 0)
    report = verify_certificate(3, [2, 1, 0], LINE, cert)
    assert report.ok and report.matches_reported
    assert report.domination_residual == 1.5 and report.descent_residual == 1.0


def test_verify_flags_forged_point():
    real = ekeland_metric([2, 1, 0], LINE, 0.5, 0)
    forged = EkelandCertificate("metric", 0, 0.5, 0, 9.0, 0.0, (), real.orbit, real.outcome)
    report = verify_certificate(3, [2, 1, 0], LINE, forged)
    assert not report.ok
    assert report.violations == (1, 2)
    assert report.domination_residual == -1.0
    assert not report.matches_reported


def test_verify_singleton():
    cert = ekeland_metric([4], [[0]], 1, 0)
    report = verify_certificate(1, [4], [[0]], cert)
    assert report.ok and report.domination_residual == INF


def test_verify_with_callable_distance():
    cert = ekeland_premetric([2, 1, 0], LINE, 0.5, 0)
    report = verify_certificate(3, [2, 1, 0], lambda i, j: LINE[i][j], cert)
    assert report.ok and report.matches_reported


# ---- Caristi ---------------------------------------------------------------


def test_caristi_identity_map():
    inst = CaristiInstance(((0,), (1,), (2,)), [5, 3, 1], LINE)
    res = caristi_fixed_point(inst, 0)
    assert res.point in inst.T[res.point]
    const = CaristiInstance(((0,), (1,)), [0, 0], [[0, 1], [1, 0]])
    assert caristi_fixed_point(const, 0).point == 0


def test_caristi_line():
    inst = CaristiInstance(((1,), (2,), (2,)), [2, 1, 0], LINE)
    assert check_caristi_condition(inst).summary() == "CK condition: pass (3/3 points)"
    res = caristi_fixed_point(inst, 0)
    assert res.point == 2 and 2 in inst.T[2]
    assert res.orbit.points == (0, 2)


def test_caristi_two_point():
    inst = CaristiInstance(((1,), (1,)), [1, 0], [[0, 1], [1, 0]])
    assert caristi_fixed_point(inst, 0).point == 1


def test_caristi_condition_failure_has_witness():
    inst = CaristiInstance(((1,), (1,)), [1, 0], [[0, 5], [5, 0]])
    check = check_caristi_condition(inst)
    assert not check.passed and check.failures == (0,)
    assert check.summary(["a", "b"]) == "CK condition: FAIL (1/2 points), violated at a"
    with pytest.raises(HypothesisViolation) as info:
        caristi_fixed_point(inst, 0)
    assert info.value.witness == 0


def test_caristi_map_out_of_space():
    with pytest.raises(IndexError):
        CaristiInstance(((3,), (1,)), [1, 0], [[0, 1], [1, 0]])


# ---- Takahashi -------------------------------------------------------------


def test_takahashi_line():
    res = takahashi_minimize([2, 1, 0], LINE, 0)
    assert res.v == 2 and res.is_min and res.condition_witness_failure is None


def test_takahashi_constant():
    res = takahashi_minimize([3, 3], [[0, 1], [1, 0]], 1)
    assert res.v == 1 and res.is_min


def test_takahashi_condition_broken():
    g = [[0, 5], [5, 0]]
    res = takahashi_minimize([1, 0], g, 0)
    assert res.v == 0 and not res.is_min and res.condition_witness_failure == 0
    check = check_takahashi_condition([1, 0], g)
    assert check.failures == (0,) and check.checked == 1


# ---- Oettli-Thera ----------------------------------------------------------


def _potential(f):
    n = len(f)
    return [[f[y] - f[x] for y in range(n)] for x in range(n)]


def test_oettli_everything_in_psi():
    inst = OettliInstance(_potential([2, 1, 0]), LINE, 1, frozenset({0, 1, 2}))
    res = oettli_thera(inst)
    assert res.point == 1 and res.in_A and res.in_Psi


def test_oettli_line():
    inst = OettliInstance(_potential([2, 1, 0]), LINE, 0, frozenset({2}))
    assert inst.descent_set() == [0, 1, 2]
    assert check_oettli_hypothesis(inst).passed
    res = oettli_thera(inst)
    assert res.point == 2 and res.in_A and res.in_Psi and res.A == (0, 1, 2)


def test_oettli_infinite_entry_blocks_moves():
    p = [[0, INF, INF], [-2, 0, 0], [-2, 0, 0]]
    inst = OettliInstance(p, LINE, 0, frozenset({0}))
    res = oettli_thera(inst)
    assert res.point == 0 and res.orbit.points == (0,)


def test_oettli_missing_escape():
    inst = OettliInstance(_potential([2, 1, 0]), [[0, 5, 9], [5, 0, 5], [9, 5, 0]], 0, frozenset())
    check = check_oettli_hypothesis(inst)
    assert not check.passed and check.failures == (0,)
    with pytest.raises(HypothesisViolation):
        oettli_thera(inst)


def test_oettli_validation():
    with pytest.raises(ValueError, match="diagonal"):
        OettliInstance([[1, 0], [0, 0]], [[0, 1], [1, 0]], 0, frozenset())
    with pytest.raises(ValueError, match="triangle"):
        OettliInstance([[0, 0, 5], [0, 0, 0], [0, 0, 0]], LINE, 0, frozenset())
    with pytest.raises(ValueError, match="metric"):
        OettliInstance([[0, 0], [0, 0]], [[0, 1], [3, 0]], 0, frozenset())
    with pytest.raises(ValueError, match="NaN"):
        OettliInstance([[0, math.nan], [0, 0]], [[0, 1], [1, 0]], 0, frozenset())


# ---- Fabian-Preiss ---------------------------------------------------------


def test_fabian_preiss_line():
    inst = FabianPreissInstance((LINE,), ([2, 1, 0],), 0, 0)
    assert inst.reachable_set() == [0, 1, 2]
    assert check_fabian_preiss_hypothesis(inst).passed
    res = fabian_preiss(inst)
    assert res.point == 2 and res.f_i0_value == 0


def test_fabian_preiss_already_nonpositive():
    inst = FabianPreissInstance((LINE,), ([-1, 1, 0],), 0, 0)
    res = fabian_preiss(inst)
    assert res.f_i0_value <= 0


def test_fabian_preiss_second_pseudometric_restricts_phi():
    p2 = [[0, 1, 9], [1, 0, 9], [9, 9, 0]]
    inst = FabianPreissInstance((LINE, p2), ([2, 1, 0], [3, 2, 0]), 0, 0)
    assert inst.reachable_set() == [0, 1]
    check = check_fabian_preiss_hypothesis(inst)
    assert not check.passed and check.failures == (1,)


def test_fabian_preiss_validation():
    with pytest.raises(ValueError, match="domain"):
        FabianPreissInstance((LINE,), ([INF, 1, 0],), 0, 0)
    with pytest.raises(ValueError, match="symmetric"):
        FabianPreissInstance((LINE, [[0, 1, 1], [2, 0, 1], [1, 1, 0]]), ([2, 1, 0], [0, 0, 0]), 0, 0)
    with pytest.raises(ValueError, match="host metric"):
        FabianPreissInstance((LINE,), ([2, 1, 0],), 0, 0, metric=[[0, 2, 2], [2, 0, 2], [2, 2, 0]])
