from __future__ import annotations

import math
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from repchain.errors import OutOfRange
from repchain.metro import MetroScenario, metro_fidelity, metro_fidelity_er, metro_fidelity_qr, metro_rate
from repchain.params import BASELINE_HW, DEFAULT_GEOMETRY, OPTIMISTIC_HW, derive_timing

TIMING = derive_timing(DEFAULT_GEOMETRY)
POINT_O = replace(BASELINE_HW, p_m0=1.43e-2, t_coh=0.196, f_m=0.88)


def scenario(hw, mode="ER"):
    return MetroScenario.from_hardware(hw, DEFAULT_GEOMETRY, mode)


def test_baseline_rate_and_fidelity():
    scn = scenario(BASELINE_HW)
    assert metro_rate(scn) == pytest.approx(0.14, abs=0.005)
    assert metro_fidelity_er(scn) == pytest.approx(0.9192, abs=1e-4)
    assert metro_fidelity_qr(scenario(BASELINE_HW, "QR")) < 2 / 3


def test_point_o():
    scn = scenario(POINT_O, "QR")
    assert metro_rate(scn) == pytest.approx(3.36, abs=0.05)
    assert metro_fidelity(scn) == pytest.approx(2 / 3, abs=1e-3)


def test_first_attempt_success():
    scn = MetroScenario(1.0, 0.8, 1e9, TIMING)
    assert metro_rate(scn) == pytest.approx(1e6 / (2 * TIMING.t_m_class + TIMING.t_mprime))


def test_limits():
    assert metro_fidelity_er(MetroScenario(0.1, 0.0, 1e5, TIMING)) == 0.5
    assert metro_fidelity_er(MetroScenario(0.1, 0.7, 1e300, TIMING)) == pytest.approx(0.85)
    no_wait = replace(TIMING, t_mprime=0)
    scn = MetroScenario(1.0, 0.7, 1e5, no_wait, "QR")
    assert metro_fidelity_qr(scn) == pytest.approx(metro_fidelity_er(scn), rel=1e-15)


def test_qr_matches_direct_geometric_sum():
    scn = MetroScenario(0.3, 0.8, 5000.0, TIMING, "QR")
    decay = math.exp(-TIMING.t_m_class / 5000.0)
    wait = sum(0.3 * 0.7 ** (m - 1) * math.exp(-m * TIMING.t_mprime / 5000.0) for m in range(1, 400))
    assert metro_fidelity_qr(scn) == pytest.approx(0.5 + 0.5 * 0.8 * decay * wait, rel=1e-13)


box = st.tuples(st.floats(5.95e-4, 1.43e-2), st.floats(0.062, 4.0), st.floats(0.88, 0.99))


@settings(max_examples=100, deadline=None)
@given(box, st.sampled_from(["p_m0", "t_coh", "f_m"]), st.floats(1.001, 1.5))
def test_qr_monotone_in_each_parameter(point, name, factor):
    hw = replace(BASELINE_HW, p_m0=point[0], t_coh=point[1], f_m=point[2])
    bigger = replace(hw, **{name: min(getattr(hw, name) * factor, 0.9999 if name != "t_coh" else 1e3)})
    assert metro_fidelity_qr(scenario(bigger, "QR")) >= metro_fidelity_qr(scenario(hw, "QR"))


@settings(max_examples=100, deadline=None)
@given(box)
def test_qr_never_exceeds_er(point):
    hw = replace(BASELINE_HW, p_m0=point[0], t_coh=point[1], f_m=point[2])
    qr = metro_fidelity_qr(scenario(hw, "QR"))
    assert 0.5 <= qr < metro_fidelity_er(scenario(hw)) <= 1.0
    assert metro_rate(scenario(hw)) == metro_rate(scenario(hw, "QR"))


def test_optimistic_rate_is_higher():
    assert metro_rate(scenario(OPTIMISTIC_HW)) > metro_rate(scenario(BASELINE_HW))


def test_validation():
    with pytest.raises(OutOfRange):
        MetroScenario(0.0, 0.5, 1.0, TIMING)
    with pytest.raises(OutOfRange):
        MetroScenario(0.5, 0.5, 1.0, TIMING, "XR")  # type: ignore[arg-type]
