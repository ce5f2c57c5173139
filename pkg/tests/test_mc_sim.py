from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from repchain.intercity import IntercityScenario, evaluate
from repchain.mc_sim import (
    McConfig,
    _Thinning,
    batch_rng,
    dm_teleport_oracle,
    nearest_rank,
    run_batches,
    sample_round,
    simulate_batches,
    simulate_metro_runs,
    simulate_run,
    simulate_runs,
    teleport_density,
    teleport_fidelity_closed_form,
    werner_sequential,
    x_diff,
)
from repchain.metro import MetroScenario, metro_fidelity_qr, metro_rate
from repchain.params import BASELINE_HW, DEFAULT_GEOMETRY, OPTIMISTIC_HW, Timing

from .oracles import brute_force


def toy(p_m=0.3, p_b=0.25, t_m=2, t_b=3, t_msg=1, t_cut=5, t_coh=40.0, t_int=2):
    return IntercityScenario(p_m, p_b, Timing(1, 1, t_m, t_m, t_b, t_msg, t_int, 1), t_coh, 0.9, 0.85, t_cut)


def within_sigma(samples, target, n_sigma=4.0):
    samples = np.asarray(samples, dtype=float)
    se = samples.std(ddof=1) / math.sqrt(samples.size)
    return abs(samples.mean() - target) <= n_sigma * se + 1e-12


def test_nearest_rank():
    values = np.arange(1, 101)
    assert nearest_rank(values, 5) == 5
    assert nearest_rank(values, 95) == 95
    assert nearest_rank([3.0, 1.0, 2.0], 50) == 2.0
    assert nearest_rank([7.0], 5) == 7.0
    with pytest.raises(ValueError):
        nearest_rank([], 5)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 50), st.integers(1, 50), st.integers(1, 50), st.floats(0.0, 0.2), st.integers(0, 5))
def test_sequential_swaps_match_exposure_formula(x1, x2, xb, k, t_msg):
    w = werner_sequential(x1, x2, xb, 0.9, 0.8, k, t_msg)
    expected = 0.9**2 * 0.8 * math.exp(-k * (float(x_diff(x1, x2, xb)) + t_msg))
    assert w == pytest.approx(expected, rel=1e-12)


def test_x_diff_cases():
    assert x_diff(2, 3, 10) == 2 * 10 - 2 - 3
    assert x_diff(10, 3, 4) == 7
    assert x_diff(4, 4, 4) == 0


def test_sample_round_success_frequency_matches_analytic():
    scn = toy()
    rng = np.random.default_rng(11)
    hits = np.array([sample_round(rng, scn).y for _ in range(20_000)], dtype=float)
    assert within_sigma(hits, evaluate(scn).p)


def test_sample_round_outcome_consistency():
    scn = toy()
    rng = np.random.default_rng(3)
    for _ in range(500):
        r = sample_round(rng, scn)
        if r.y:
            assert r.x_max - r.x_min <= scn.t_cut - 1
            assert r.z == r.x_max + scn.timing.t_msg
            assert r.w_e2e == pytest.approx(werner_sequential(r.x1, r.x2, r.xb, 0.9, 0.85, scn.k, 1))
        else:
            assert r.x_max - r.x_min >= scn.t_cut
            assert r.z == r.x_min + scn.t_cut and math.isnan(r.w_e2e)


def test_baseline_success_frequency_over_many_rounds():
    scn = IntercityScenario.from_hardware(BASELINE_HW, DEFAULT_GEOMETRY, 62_000)
    rng = np.random.default_rng(5)
    th = _Thinning(scn)
    x1, x2 = th.metro(rng, 200_000)
    xb = rng.geometric(scn.p_b, size=x1.size) * scn.timing.t_b
    hi = np.maximum(np.maximum(x1, x2), xb)
    lo = np.minimum(np.minimum(x1, x2), xb)
    ok = (hi - lo <= scn.t_cut - 1).astype(float)
    p = evaluate(scn).p
    assert abs(ok.mean() - p) <= 3 * math.sqrt(p * (1 - p) / ok.size) + 1.0 / ok.size


def test_thinning_window_is_exact_success_set():
    scn = toy(t_cut=6)
    th = _Thinning(scn)
    rng = np.random.default_rng(1)
    x1, x2 = th.metro(rng, 2000)
    j_lo, j_hi, s = th.window(x1, x2)
    for a, b, lo, hi, prob in zip(x1, x2, j_lo, j_hi, s):
        ok = [j for j in range(1, 60) if max(a, b, j * 3) - min(a, b, j * 3) <= 5]
        if ok:
            assert (lo, hi) == (ok[0], ok[-1])
            assert prob == pytest.approx(sum(0.25 * 0.75 ** (j - 1) for j in ok), rel=1e-12)
        else:
            assert prob == 0.0
        assert prob <= th.s_max + 1e-15


def test_thinning_conditional_samplers_respect_window():
    th = _Thinning(toy(t_cut=7))
    rng = np.random.default_rng(2)
    x1, x2 = th.metro(rng, 5000)
    j_lo, j_hi, s = th.window(x1, x2)
    has = j_hi >= j_lo
    inside = th.inside(rng, j_lo[has], j_hi[has])
    assert np.all((inside >= j_lo[has]) & (inside <= j_hi[has]))
    outside = th.outside(rng, j_lo, j_hi)
    assert not np.any(has & (outside >= j_lo) & (outside <= j_hi))


def test_thinning_outside_distribution():
    th = _Thinning(toy(p_b=0.3))
    rng = np.random.default_rng(4)
    n = 100_000
    j_lo, j_hi = np.full(n, 3), np.full(n, 5)
    draws = th.outside(rng, j_lo, j_hi)
    pmf = {j: 0.3 * 0.7 ** (j - 1) for j in range(1, 40) if not 3 <= j <= 5}
    total = sum(pmf.values())
    for j in (1, 2, 6, 7):
        freq = float(np.mean(draws == j))
        p = pmf[j] / total
        assert abs(freq - p) <= 4 * math.sqrt(p * (1 - p) / n)


@pytest.mark.parametrize("t_cut", [3, 5, 9])
def test_thinned_runs_agree_with_naive_runs_and_analytic(t_cut):
    scn = toy(t_cut=t_cut)
    pt = evaluate(scn)
    rng = np.random.default_rng(t_cut)
    thinned = simulate_runs(scn, 40_000, rng)
    naive = np.array([simulate_run(rng, scn) for _ in range(8_000)])
    assert within_sigma(thinned.fidelity_er, pt.fidelity_er)
    assert within_sigma(thinned.fidelity_qr, pt.fidelity_qr)
    assert within_sigma(thinned.e2e_us, pt.e2e_time_us)
    assert within_sigma(naive[:, 0], pt.fidelity_er)
    assert within_sigma(naive[:, 1], pt.fidelity_qr)
    assert within_sigma(naive[:, 2], pt.e2e_time_us)
    assert within_sigma(thinned.n_rounds, 1.0 / pt.p)


def test_thinned_runs_with_long_failure_streaks():
    # Small p_b forces many skipped rounds, exercising the block-sum path.
    scn = IntercityScenario.from_hardware(replace(OPTIMISTIC_HW, p_b=2e-4), DEFAULT_GEOMETRY, 60_000)
    pt = evaluate(scn)
    samples = simulate_runs(scn, 4_000, np.random.default_rng(8))
    assert within_sigma(samples.e2e_us, pt.e2e_time_us)
    assert within_sigma(samples.fidelity_er, pt.fidelity_er)
    assert np.all(samples.n_rounds >= 1)


def test_metro_runs_match_analytic():
    scn = MetroScenario.from_hardware(replace(BASELINE_HW, p_m0=1.43e-2, t_coh=0.196), DEFAULT_GEOMETRY, "QR")
    samples = simulate_metro_runs(scn, 50_000, np.random.default_rng(6))
    assert within_sigma(samples.fidelity_qr, metro_fidelity_qr(scn))
    assert within_sigma(samples.e2e_us, 1e6 / metro_rate(scn))


def test_run_batches_is_deterministic_per_seed():
    scn = toy()
    cfg = McConfig(scn, "QR", batches=6, runs_per_batch=30, master_seed=99)
    assert run_batches(cfg) == run_batches(cfg)
    other = run_batches(replace(cfg, master_seed=100))
    assert other.batch_fidelity != run_batches(cfg).batch_fidelity


def test_batches_use_independent_streams():
    a = batch_rng(7, 0).random(4)
    b = batch_rng(7, 1).random(4)
    assert not np.allclose(a, b)
    first = simulate_batches(toy(), 3, 10, 7)
    again = simulate_batches(toy(), 2, 10, 7)
    np.testing.assert_array_equal(first[1].e2e_us, again[1].e2e_us)


def test_run_batches_band_contains_analytic_on_toy():
    scn = toy()
    stats = run_batches(McConfig(scn, "ER", batches=100, runs_per_batch=100, master_seed=2024))
    pt = evaluate(scn)
    assert stats.p5 <= pt.fidelity_er <= stats.p95
    assert stats.rate_p5 <= pt.rate <= stats.rate_p95
    assert stats.p5 <= stats.mean_fidelity <= stats.p95
    assert len(stats.batch_fidelity) == 100


def test_mc_config_validation():
    with pytest.raises(ValueError):
        McConfig(toy(), "ER", batches=0)
    with pytest.raises(ValueError):
        McConfig(toy(), "XR")  # type: ignore[arg-type]


def random_qubit(rng):
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return v / np.linalg.norm(v)


def test_dm_oracle_matches_closed_form():
    rng = np.random.default_rng(10)
    for _ in range(120):
        w, p_d = rng.uniform(0, 1, size=2)
        t_class, t_coh = rng.uniform(0, 5000), rng.uniform(100, 1e6)
        got = dm_teleport_oracle(w, p_d, t_class, t_coh, random_qubit(rng))
        assert abs(got - teleport_fidelity_closed_form(w, p_d, t_class, t_coh)) <= 1e-12


def test_dm_oracle_preserves_trace_and_positivity():
    rng = np.random.default_rng(12)
    for _ in range(20):
        seen = []

        def check(rho):
            seen.append(rho.shape)
            assert abs(np.trace(rho) - 1.0) <= 1e-12
            np.testing.assert_allclose(rho, rho.conj().T, atol=1e-13)
            assert np.linalg.eigvalsh(rho).min() >= -1e-12

        teleport_density(random_qubit(rng), rng.uniform(), rng.uniform(), 100.0, 1e4, check)
        assert seen == [(8, 8), (8, 8), (8, 8), (2, 2), (2, 2)]


def test_dm_oracle_is_state_independent():
    rng = np.random.default_rng(13)
    values = [dm_teleport_oracle(0.7, 0.9, 300.0, 5e4, random_qubit(rng)) for _ in range(10)]
    assert max(values) - min(values) <= 1e-13


def test_perfect_teleportation():
    assert dm_teleport_oracle(1.0, 1.0, 0.0, 1.0) == pytest.approx(1.0, abs=1e-14)
    assert dm_teleport_oracle(0.0, 1.0, 0.0, 1.0) == pytest.approx(0.5, abs=1e-14)


def test_brute_force_agrees_with_mc_round_moments():
    scn = toy(t_cut=4)
    bf = brute_force(scn.p_m, scn.p_b, 2, 3, 1, 4, scn.k)
    rng = np.random.default_rng(21)
    rounds = [sample_round(rng, scn) for _ in range(20_000)]
    z_success = np.array([r.z if r.y else 0.0 for r in rounds])
    assert within_sigma(z_success, bf.ez_success)
