"""Thermal stepping exactness and the linear force law."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from snaposc import (Environment, InvalidTolerance, actuator_force,
                     cooling_limited, cooling_time, equilibrium_temperature_rise,
                     snap_delta_temperature, temperature_step)

ENV = Environment(temperature=22.0, label="forced-air")


def test_fixed_point_at_ambient(ref_act):
    for dt in (0.0, 1e-3, 1.0, 1e4):
        assert temperature_step(22.0, 0.0, dt, ref_act, ENV) == pytest.approx(22.0)


def test_long_time_asymptote(ref_act):
    final = temperature_step(22.0, 0.60, 1e6, ref_act, ENV)
    assert final == pytest.approx(22.0 + equilibrium_temperature_rise(0.60, ref_act),
                                  rel=1e-12)


def test_one_time_constant(ref_act):
    tau = ref_act.thermal_mass / ref_act.conductivity
    # frozen: 22 + 59.22077922 * (1 - 1/e)
    assert temperature_step(22.0, 0.60, tau, ref_act, ENV) == pytest.approx(
        59.4346720553016, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(T=st.floats(-50.0, 400.0), current=st.floats(0.0, 5.0),
       a=st.floats(0.0, 20.0), b=st.floats(0.0, 20.0))
def test_step_composition_is_exact(T, current, a, b):
    from snaposc import reference_actuator
    act = reference_actuator()
    one = temperature_step(T, current, a + b, act, ENV)
    two = temperature_step(temperature_step(T, current, a, act, ENV),
                           current, b, act, ENV)
    assert two == pytest.approx(one, rel=1e-12, abs=1e-9)


def test_monotone_approach_to_equilibrium(ref_act):
    t_eq = 22.0 + equilibrium_temperature_rise(0.58, ref_act)
    for start in (22.0, 150.0):
        T = start
        gaps = []
        for _ in range(200):
            T = temperature_step(T, 0.58, 0.05, ref_act, ENV)
            gaps.append(abs(T - t_eq))
        assert all(x > y for x, y in zip(gaps, gaps[1:]))


def test_cooling_never_undershoots_ambient(ref_act):
    T = 120.0
    prev = T
    for _ in range(5000):
        T = temperature_step(T, 0.0, 0.01, ref_act, ENV)
        assert T >= 22.0
        if prev - 22.0 > 1e-9:  # strictly decreasing until float saturation
            assert T < prev
        prev = T


def test_actuator_force_reference_states(ref_act, ref_beam):
    assert actuator_force(22.0, ref_beam.w_rise, ref_act, ENV, 1, ref_beam) == 0.0
    # at the snap temperature and fold the pull equals the critical force
    dT = snap_delta_temperature(ref_beam, ref_act, "thru")
    assert actuator_force(22.0 + dT, ref_beam.w_snap_thru, ref_act, ENV, 1,
                          ref_beam) == pytest.approx(ref_beam.f_snap_thru, rel=1e-12)
    dT_back = snap_delta_temperature(ref_beam, ref_act, "back")
    assert actuator_force(22.0 + dT_back, ref_beam.w_snap_back, ref_act, ENV, 2,
                          ref_beam) == pytest.approx(ref_beam.f_snap_back, rel=1e-12)


def test_actuator_force_at_hot_equilibrium(ref_act, ref_beam):
    T = 22.0 + equilibrium_temperature_rise(0.60, ref_act)
    # frozen: 0.016 * 59.22077922
    assert actuator_force(T, ref_beam.w_rise, ref_act, ENV, 1, ref_beam) == \
        pytest.approx(0.9475324675324676, rel=1e-12)


def test_actuator_force_side_2_is_mirrored(ref_act, ref_beam):
    # side 2 reads -w, so it is at rest when the beam sits at -w_rise
    assert actuator_force(22.0, -ref_beam.w_rise, ref_act, ENV, 2, ref_beam) == 0.0


def test_cooling_time_values(ref_act, ref_beam):
    dT = snap_delta_temperature(ref_beam, ref_act)
    # frozen: (0.0299/0.0231) * ln(47.775/2)
    assert cooling_time(dT, 2.0, ref_act) == pytest.approx(4.1075031929019525, rel=1e-12)
    assert cooling_time(5.0, 5.0, ref_act) == 0.0
    assert cooling_time(1.0, 2.0, ref_act) == 0.0
    import dataclasses
    heavy = dataclasses.replace(ref_act, thermal_mass=2 * ref_act.thermal_mass)
    assert cooling_time(dT, 2.0, heavy) == pytest.approx(
        2 * cooling_time(dT, 2.0, ref_act), rel=1e-12)


def test_cooling_time_rejects_bad_tolerance(ref_act):
    with pytest.raises(InvalidTolerance):
        cooling_time(10.0, 0.0, ref_act)
    with pytest.raises(InvalidTolerance):
        cooling_time(10.0, -1.0, ref_act)


def test_cooling_limited_flags_fast_designs(ref_act, ref_beam):
    assert cooling_limited(2.0, ref_beam, ref_act)
    assert not cooling_limited(60.0, ref_beam, ref_act)
