"""Smoke checks of the Python bindings: the heavy numerical verification
lives in the C++ suites; here we only prove the module surface works."""

import math

import pytest

import fcldvr


def test_version():
    assert fcldvr.__version__


def test_design_helpers():
    omega = 2.0 * math.pi * 50.0
    lm = fcldvr.size_magnetizing_inductance(220.0, omega, 2.0, 4.8605286307522535)
    assert lm == pytest.approx(0.07203761183235315, rel=1e-12)
    assert fcldvr.dc_link_limit(1200.0) == pytest.approx(780.0)
    assert fcldvr.turns_ratio_for_sag(0.9, 220.0, 39.6) == pytest.approx(5.0)


def test_validation_maps_to_value_error():
    with pytest.raises(ValueError):
        fcldvr.dc_link_limit(-1.0)


def test_preset_scenario_runs():
    scenario = fcldvr.preset_scenario("table2")
    scenario.horizon = 0.1
    result = fcldvr.run_scenario(scenario)
    assert result.trace.size() == 10001
    assert result.rated_peak_current == pytest.approx(6.8738255099125665, rel=1e-12)
    # Uneventful run: everything stays in normal mode with no injection.
    assert all(m == fcldvr.OperatingMode.Normal for m in result.trace.mode)
    assert max(abs(u) for u in result.trace.u_comp) == 0.0


def test_fault_is_limited():
    scenario = fcldvr.preset_scenario("table2")
    fault = fcldvr.FaultEvent()
    fault.start = 0.25
    fault.end = 0.35
    scenario.faults = [fault]
    result = fcldvr.run_scenario(scenario)
    amp = fcldvr.steady_fundamental_amplitude(
        result.trace, fcldvr.TraceChannel.ILine, 0.35, 50.0
    )
    assert amp == pytest.approx(12.047938230523835, rel=0.02)
    assert result.events[0].to_mode == fcldvr.OperatingMode.FaultLimiting


def test_scenario_round_trip():
    scenario = fcldvr.preset_scenario("table3")
    text = fcldvr.serialize_scenario(scenario)
    again = fcldvr.parse_scenario(text)
    assert fcldvr.serialize_scenario(again) == text


def test_harmonic_analysis():
    n = 2000
    dt = 0.02 / n
    samples = [
        math.sin(2 * math.pi * k / n) + 0.1 * math.sin(3 * 2 * math.pi * k / n)
        for k in range(n)
    ]
    analysis = fcldvr.harmonic_analysis(samples, dt, 50.0, 10)
    assert analysis.thd == pytest.approx(0.1, abs=1e-9)
    assert analysis.amplitudes[0] == pytest.approx(1.0, abs=1e-9)
