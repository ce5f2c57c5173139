from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from repchain.errors import EmptyCutoffDomain, Infeasible
from repchain.intercity import IntercityScenario
from repchain.params import BASELINE_HW, DEFAULT_GEOMETRY, OPTIMISTIC_HW, ParamKind, derive_timing
from repchain.requirements import (
    F_TARGET,
    OMEGA_PENALTY,
    CutoffDomain,
    OptimProblem,
    ScenarioKind,
    best_over_tcut,
    cut_off_domain,
    cutoff_domain_for,
    feasibility_region,
    fidelity_at,
    max_rate_at_target,
    min_fidelity_surface,
    min_link_fidelity,
    optimize,
    reference_points,
    question,
    rate_at,
    scalarized_cost,
)

TIMING = derive_timing(DEFAULT_GEOMETRY)
K = ScenarioKind


def test_cutoff_domain_examples():
    assert cutoff_domain_for(TIMING, 62_000) == CutoffDomain(2425, 62_000)
    assert cutoff_domain_for(TIMING, 62_000).first == 2426
    dom = cutoff_domain_for(TIMING, 4_000_000)
    assert (dom.lower, dom.first, dom.upper) == (40_000, 40_001, 4_000_000)
    assert 40_000 not in dom and 40_001 in dom and 4_000_001 not in dom
    with pytest.raises(EmptyCutoffDomain):
        cutoff_domain_for(TIMING, 2_000)


def test_cutoff_domain_rounds_one_percent_up():
    assert cutoff_domain_for(TIMING, 300_050).lower == 3001


def test_cut_off_domain_of_scenario():
    scn = IntercityScenario.from_hardware(BASELINE_HW, DEFAULT_GEOMETRY, 5000)
    assert cut_off_domain(scn) == CutoffDomain(2425, 62_000)


def test_scenario_kind_properties():
    assert K.METRO_QR.is_metro and not K.INTERCITY_ER.is_metro
    assert K.INTERCITY_QR.mode == "QR" and K.METRO_ER.mode == "ER"
    assert K("IntercityER") is K.INTERCITY_ER


def test_er_best_is_at_domain_start():
    f, t = best_over_tcut(OPTIMISTIC_HW, K.INTERCITY_ER)
    assert t == 40_001
    assert f >= fidelity_at(OPTIMISTIC_HW, K.INTERCITY_ER, 40_100)


def test_qr_best_is_interior_and_locally_optimal():
    hw = OPTIMISTIC_HW
    f, t = best_over_tcut(hw, K.INTERCITY_QR)
    dom = cutoff_domain_for(TIMING, hw.t_coh_us)
    assert dom.first < t < dom.upper
    for other in (t - 1, t + 1, t - 1000, t + 1000, dom.first, dom.upper):
        assert fidelity_at(hw, K.INTERCITY_QR, other) <= f + 1e-15
    coarse = [fidelity_at(hw, K.INTERCITY_QR, int(c)) for c in np.geomspace(dom.first, dom.upper, 200)]
    assert f >= max(coarse) - 1e-12


def test_best_over_tcut_on_single_point_domain():
    # A coherence time just above t_b leaves exactly one admissible cut-off.
    hw = replace(OPTIMISTIC_HW, t_coh=2426e-6)
    f, t = best_over_tcut(hw, K.INTERCITY_QR)
    assert t == 2426
    assert f == fidelity_at(hw, K.INTERCITY_QR, 2426)


def test_metro_best_has_no_cutoff():
    f, t = best_over_tcut(BASELINE_HW, K.METRO_ER)
    assert t is None and f == pytest.approx(0.9192, abs=1e-4)


def test_max_rate_frontier_is_consistent():
    hw = question("q2", "ER").fixed
    rate, t = max_rate_at_target(hw, K.INTERCITY_ER)
    assert fidelity_at(hw, K.INTERCITY_ER, t) >= F_TARGET
    assert fidelity_at(hw, K.INTERCITY_ER, t + 1) < F_TARGET
    assert rate == pytest.approx(rate_at(hw, K.INTERCITY_ER, t))
    assert rate == pytest.approx(4.00e-4, rel=0.05)


def test_max_rate_q3_er():
    rate, _ = max_rate_at_target(question("q3", "ER").fixed, K.INTERCITY_ER)
    assert rate == pytest.approx(6.16e-4, rel=0.05)


def test_max_rate_infeasible_raises():
    with pytest.raises(Infeasible):
        max_rate_at_target(BASELINE_HW, K.INTERCITY_QR)
    with pytest.raises(Infeasible):
        max_rate_at_target(BASELINE_HW, K.METRO_QR)


def test_max_rate_reaches_domain_end_when_always_feasible():
    hw = replace(OPTIMISTIC_HW, p_m0=0.9, p_b=0.9, f_m=0.999, f_b=0.999)
    rate, t = max_rate_at_target(hw, K.INTERCITY_ER, f_target=0.5)
    assert t == cutoff_domain_for(TIMING, hw.t_coh_us).upper
    assert rate == pytest.approx(rate_at(hw, K.INTERCITY_ER, t))


def test_scalarized_cost():
    problem = question("q1", "ER")
    assert scalarized_cost(BASELINE_HW, problem) == pytest.approx(3.0)
    h = problem.cost(OPTIMISTIC_HW)
    assert scalarized_cost(OPTIMISTIC_HW, problem, fidelity=0.6) == OMEGA_PENALTY * (1 + (2 / 3 - 0.6) ** 2) + h
    assert scalarized_cost(OPTIMISTIC_HW, problem, fidelity=0.7) == pytest.approx(h)


def test_questions():
    q1 = question("q1", "qr")
    assert q1.kind is K.METRO_QR and len(q1.free) == 3
    q2 = question("q2", "ER")
    assert q2.fixed.p_b == OPTIMISTIC_HW.p_b and q2.fixed.p_m0 == BASELINE_HW.p_m0
    q3 = question("q3", "QR")
    assert q3.free == (ParamKind.BACKBONE_PROB, ParamKind.BACKBONE_FIDELITY)
    assert q3.fixed.t_coh == OPTIMISTIC_HW.t_coh
    assert len(question("q4", "ER").free) == 5
    with pytest.raises(ValueError):
        question("q5", "ER")
    with pytest.raises(ValueError):
        question("q1", "XR")


def test_problem_box_corners():
    problem = question("q4", "QR")
    n = len(problem.free)
    assert problem.hardware(np.zeros(n)) == BASELINE_HW
    top = problem.hardware(np.ones(n))
    for kind in problem.free:
        assert getattr(top, kind.field) == pytest.approx(getattr(OPTIMISTIC_HW, kind.field), rel=1e-12)
    assert problem.cost(BASELINE_HW) == pytest.approx(5.0)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-0.5, 1.5), min_size=5, max_size=5))
def test_problem_hardware_stays_in_box(y):
    problem = question("q4", "ER")
    hw = problem.hardware(y)
    for kind in problem.free:
        value = getattr(hw, kind.field)
        assert getattr(BASELINE_HW, kind.field) <= value <= getattr(OPTIMISTIC_HW, kind.field) * (1 + 1e-12)
    assert problem.cost(hw) >= 5.0 - 1e-9


def test_problem_validation():
    with pytest.raises(ValueError):
        OptimProblem(K.METRO_ER, (ParamKind.COHERENCE_TIME, ParamKind.COHERENCE_TIME), BASELINE_HW)
    with pytest.raises(ValueError):
        OptimProblem(K.METRO_ER, (ParamKind.COHERENCE_TIME,), BASELINE_HW, baseline=OPTIMISTIC_HW, optimistic=BASELINE_HW)


def test_optimize_returns_feasible_baseline():
    result = optimize(question("q1", "ER"))
    assert result.hardware == BASELINE_HW
    assert result.cost_h == pytest.approx(3.0) and result.feasible


def test_optimize_q1_qr_small_budget():
    problem = question("q1", "QR", restarts=4)
    result = optimize(problem)
    ref = reference_points()["q1-QR"]
    ref_cost = problem.cost(replace(BASELINE_HW, p_m0=ref[ParamKind.BASE_EFFICIENCY],
                                  t_coh=ref[ParamKind.COHERENCE_TIME], f_m=ref[ParamKind.METRO_FIDELITY]))
    assert result.feasible and result.fidelity >= F_TARGET
    assert result.cost_h <= 1.02 * ref_cost
    assert result.t_cut_star is None
    assert result.to_json()["point"]["p_m0"] == result.point[ParamKind.BASE_EFFICIENCY]


def test_optimize_is_deterministic():
    problem = question("q1", "QR", restarts=3, seed=5)
    assert optimize(problem) == optimize(problem)


def test_optimize_reports_infeasible_without_budget():
    problem = question("q4", "QR", optimistic=BASELINE_HW, restarts=2)
    result = optimize(problem)
    assert not result.feasible
    assert result.fidelity == pytest.approx(0.50, abs=0.01)
    assert result.deficit == pytest.approx(F_TARGET - result.fidelity)


def test_min_link_fidelity_matches_closed_form_for_metro_er():
    for t_coh in (0.01, 0.062, 1.0):
        hw = replace(BASELINE_HW, t_coh=t_coh)
        w = (1.0 / 3.0) / math.exp(-TIMING.t_m_class / hw.t_coh_us)
        assert min_link_fidelity(hw, K.METRO_ER) == pytest.approx((1 + 3 * w) / 4, abs=1e-9)


def test_min_fidelity_surface_rows():
    rows = min_fidelity_surface([BASELINE_HW.p_m0], [BASELINE_HW.t_coh, 0.015], question("q2", "ER").fixed, K.INTERCITY_ER)
    base, short = rows
    assert base.feasible and base.f_min <= 0.88
    assert short.f_min > base.f_min + 0.1
    empty = min_fidelity_surface([BASELINE_HW.p_m0], [0.001], question("q2", "ER").fixed, K.INTERCITY_ER)
    assert not empty[0].feasible and math.isnan(empty[0].f_min)
    assert min_fidelity_surface([], [0.1], BASELINE_HW, K.METRO_ER) == []


def test_feasibility_region_rows():
    fixed = question("q3", "ER").fixed
    (er,) = feasibility_region([BASELINE_HW.p_b], [BASELINE_HW.f_b], fixed, K.INTERCITY_ER)
    assert er.feasible and er.max_rate == pytest.approx(6.16e-4, rel=0.05)
    (qr,) = feasibility_region([BASELINE_HW.p_b], [BASELINE_HW.f_b], fixed, K.INTERCITY_QR)
    assert not qr.feasible and qr.t_cut is None


def test_q3_qr_reference_point_rate():
    hw = replace(question("q3", "QR").fixed, p_b=2.73e-3, f_b=0.64)
    f, t = best_over_tcut(hw, K.INTERCITY_QR)
    assert f == pytest.approx(F_TARGET, abs=0.005)
    assert rate_at(hw, K.INTERCITY_QR, t) == pytest.approx(0.92, rel=0.05)
