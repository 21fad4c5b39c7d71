"""Thermal-parameter fitting and single-point inversion.

The recovery oracle is the forward model itself: datasets generated from
known parameters must give those parameters back.  The underwater
conductivity value 0.194699055 W/degC was frozen from an independent
bisection of the closed form (200 halvings, cross-checked by forward
evaluation).
"""

import dataclasses
import math

import numpy as np
import pytest

from snaposc import (DegenerateDataset, Infeasible, OscillatorPeriodRegressor,
                     PeriodDataset, bundled_dataset, fit_thermal_params,
                     infer_conductivity, model_residuals, pull_time)

TRUE_C_TH = 2.99e-2
TRUE_LAMBDA = 2.31e-2
# frozen: bisection on the closed form for (1.58 A, 1.21 s), air thermal mass
LAMBDA_WATER = 0.1946990546540756
# frozen: 2 * c_th * dT_snap / (I^2 R) at 1.58 A (zero-conductivity period floor)
PERIOD_FLOOR_158 = 0.3011647298425522


def _forward_period(current, beam, act, c_th, conductivity):
    trial = dataclasses.replace(act, thermal_mass=c_th, conductivity=conductivity)
    return (pull_time(current, beam, trial, "thru")
            + pull_time(current, beam, trial, "back"))


def _make_dataset(beam, act, c_th=TRUE_C_TH, conductivity=TRUE_LAMBDA,
                  n=10, lo=0.545, hi=0.63, noise=None, rng=None):
    currents = np.linspace(lo, hi, n)
    periods = np.array([_forward_period(i, beam, act, c_th, conductivity)
                        for i in currents])
    if noise is not None:
        periods = periods * (1.0 + noise * rng.standard_normal(n))
    return PeriodDataset(currents=currents, periods=periods)


def test_residuals_vanish_on_self_generated_data(ref_beam, ref_act):
    dataset = _make_dataset(ref_beam, ref_act)
    res = model_residuals((TRUE_C_TH, TRUE_LAMBDA), dataset, ref_beam, ref_act)
    assert np.max(np.abs(res)) < 1e-12


def test_residuals_single_point(ref_beam, ref_act):
    period = _forward_period(0.60, ref_beam, ref_act, TRUE_C_TH, TRUE_LAMBDA)
    dataset = PeriodDataset(currents=np.array([0.60]), periods=np.array([period]))
    res = model_residuals((TRUE_C_TH, TRUE_LAMBDA), dataset, ref_beam, ref_act)
    assert res[0] == pytest.approx(0.0, abs=1e-12)


def test_residuals_shift_consistently_when_conductivity_doubles(ref_beam, ref_act):
    dataset = _make_dataset(ref_beam, ref_act)
    res = model_residuals((TRUE_C_TH, 2 * TRUE_LAMBDA), dataset, ref_beam, ref_act)
    assert np.all(np.abs(res) > 1e-6)
    # the period grows with conductivity, so the model overshoots everywhere
    # the trial bound leaves the points feasible (the upper half here)
    assert np.all(res[5:] > 0.0)


def test_residuals_penalize_infeasible_currents(ref_beam, ref_act):
    dataset = _make_dataset(ref_beam, ref_act)
    # huge trial conductivity puts the bound above every dataset current
    res = model_residuals((TRUE_C_TH, 10.0), dataset, ref_beam, ref_act)
    penalty_floor = 10.0 * float(np.max(dataset.periods)) - float(np.max(dataset.periods))
    assert np.all(res >= penalty_floor - 1e-9)
    # the penalty itself ramps down toward the bound, giving the optimizer
    # a slope to follow back into feasibility
    assert np.all(np.diff(res + dataset.periods) < 0.0)


def test_fit_recovers_parameters_noiseless(ref_beam, ref_act):
    dataset = _make_dataset(ref_beam, ref_act)
    result = fit_thermal_params(dataset, (0.01, 0.01), ref_beam, ref_act)
    assert result.converged
    assert abs(result.c_th - TRUE_C_TH) / TRUE_C_TH < 1e-3
    assert abs(result.conductivity - TRUE_LAMBDA) / TRUE_LAMBDA < 1e-3
    assert result.rss < 1e-12
    assert result.r_squared > 1.0 - 1e-9
    assert result.iterations > 0


def test_fit_recovery_independent_of_feasible_init(ref_beam, ref_act):
    """Init invariance over the sanctioned box, restricted to inits whose
    implied current bound does not already exclude the whole dataset (those
    raise DegenerateDataset by contract)."""
    dataset = _make_dataset(ref_beam, ref_act)
    for c0 in (1e-3, 0.03, 1.0):
        for l0 in (1e-3, 0.01, 0.03):
            result = fit_thermal_params(dataset, (c0, l0), ref_beam, ref_act)
            assert abs(result.c_th - TRUE_C_TH) / TRUE_C_TH < 1e-3, (c0, l0)
            assert abs(result.conductivity - TRUE_LAMBDA) / TRUE_LAMBDA < 1e-3, (c0, l0)


def test_fit_median_error_under_noise(ref_beam, ref_act):
    errors = []
    for seed in range(100):
        rng = np.random.default_rng(seed)
        dataset = _make_dataset(ref_beam, ref_act, noise=0.02, rng=rng)
        result = fit_thermal_params(dataset, (0.01, 0.01), ref_beam, ref_act)
        errors.append(max(abs(result.c_th - TRUE_C_TH) / TRUE_C_TH,
                          abs(result.conductivity - TRUE_LAMBDA) / TRUE_LAMBDA))
    assert float(np.median(errors)) < 0.10


def test_fit_first_order_optimality_noiseless(ref_beam, ref_act):
    """Gradient of the objective (2 J^T r, in the fitted log parameters)
    vanishes at the optimum."""
    dataset = _make_dataset(ref_beam, ref_act)
    result = fit_thermal_params(dataset, (0.01, 0.01), ref_beam, ref_act)

    def residuals_log(u_c, u_l):
        return model_residuals((math.exp(u_c), math.exp(u_l)), dataset,
                               ref_beam, ref_act)

    u_c, u_l = math.log(result.c_th), math.log(result.conductivity)
    r = residuals_log(u_c, u_l)
    h = 1e-7
    jac_c = (residuals_log(u_c + h, u_l) - residuals_log(u_c - h, u_l)) / (2 * h)
    jac_l = (residuals_log(u_c, u_l + h) - residuals_log(u_c, u_l - h)) / (2 * h)
    grad = 2.0 * np.array([np.dot(jac_c, r), np.dot(jac_l, r)])
    assert float(np.hypot(*grad)) < 1e-10


def test_fit_r_squared_matches_recomputation(ref_beam, ref_act):
    rng = np.random.default_rng(7)
    dataset = _make_dataset(ref_beam, ref_act, noise=0.02, rng=rng)
    result = fit_thermal_params(dataset, (0.01, 0.01), ref_beam, ref_act)
    rss = float(np.sum(result.residuals ** 2))
    tss = float(np.sum((dataset.periods - dataset.periods.mean()) ** 2))
    assert result.r_squared == pytest.approx(1.0 - rss / tss, abs=1e-12)
    assert result.r_squared <= 1.0


def test_fit_rejects_single_current(ref_beam, ref_act):
    dataset = PeriodDataset(currents=np.full(5, 0.40), periods=np.full(5, 6.0))
    with pytest.raises(DegenerateDataset):
        fit_thermal_params(dataset, (0.01, 0.01), ref_beam, ref_act)


def test_fit_rejects_all_points_below_initial_bound(ref_beam, ref_act):
    # init (0.01, 0.01) implies a 0.355 A bound; all points sit below it
    dataset = PeriodDataset(currents=np.array([0.20, 0.30]),
                            periods=np.array([5.0, 6.0]))
    with pytest.raises(DegenerateDataset):
        fit_thermal_params(dataset, (0.01, 0.01), ref_beam, ref_act)


def test_fit_weights_accepted(ref_beam, ref_act):
    dataset = _make_dataset(ref_beam, ref_act)
    weighted = PeriodDataset(currents=dataset.currents, periods=dataset.periods,
                             weights=np.linspace(0.5, 2.0, len(dataset)))
    result = fit_thermal_params(weighted, (0.01, 0.01), ref_beam, ref_act)
    assert abs(result.c_th - TRUE_C_TH) / TRUE_C_TH < 1e-3


def test_fit_report_round_trip(tmp_path, ref_beam, ref_act):
    import json

    dataset = _make_dataset(ref_beam, ref_act)
    result = fit_thermal_params(dataset, (0.01, 0.01), ref_beam, ref_act)
    path = tmp_path / "fit.json"
    result.save_report(path)
    with open(path) as f:
        doc = json.load(f)
    assert doc["thermal_mass_Ws_per_C"] == pytest.approx(result.c_th)
    assert doc["conductivity_W_per_C"] == pytest.approx(result.conductivity)
    assert doc["converged"] is True
    assert len(doc["residuals"]) == len(dataset)


# ------------------------------------------------------------- infer_conductivity

def test_infer_conductivity_underwater_point(ref_beam, ref_act):
    value = infer_conductivity((1.58, 1.21), TRUE_C_TH, ref_beam, ref_act)
    assert value == pytest.approx(LAMBDA_WATER, rel=1e-6)
    assert value == pytest.approx(0.195, rel=5e-3)
    assert value / TRUE_LAMBDA == pytest.approx(8.43, rel=1e-2)
    # forward round trip reproduces the operating point
    assert _forward_period(1.58, ref_beam, ref_act, TRUE_C_TH, value) == \
        pytest.approx(1.21, rel=1e-6)


def test_infer_conductivity_air_round_trip(ref_beam, ref_act):
    period = _forward_period(0.60, ref_beam, ref_act, TRUE_C_TH, TRUE_LAMBDA)
    value = infer_conductivity((0.60, period), TRUE_C_TH, ref_beam, ref_act)
    assert value == pytest.approx(TRUE_LAMBDA, rel=1e-6)


def test_infer_conductivity_infeasible_below_floor(ref_beam, ref_act):
    with pytest.raises(Infeasible):
        infer_conductivity((1.58, 0.10), TRUE_C_TH, ref_beam, ref_act)
    with pytest.raises(Infeasible):
        infer_conductivity((1.58, PERIOD_FLOOR_158 * 0.999), TRUE_C_TH,
                           ref_beam, ref_act)
    # just above the floor a solution exists
    value = infer_conductivity((1.58, PERIOD_FLOOR_158 * 1.05), TRUE_C_TH,
                               ref_beam, ref_act)
    assert value > 0.0


def test_infer_conductivity_monotone_in_period(ref_beam, ref_act):
    # better cooling (larger conductivity) makes the oscillator slower at
    # fixed current, so longer target periods need larger values
    values = [infer_conductivity((1.58, T), TRUE_C_TH, ref_beam, ref_act)
              for T in (0.8, 1.0, 1.21, 2.0)]
    assert all(a < b for a, b in zip(values, values[1:]))


# ---------------------------------------------------------------- dataset I/O

def test_dataset_csv_round_trip(tmp_path):
    dataset = PeriodDataset(currents=np.array([0.55, 0.60]),
                            periods=np.array([9.0, 4.25]),
                            weights=np.array([1.0, 2.0]))
    path = tmp_path / "data.csv"
    dataset.to_csv(path)
    loaded = PeriodDataset.from_csv(path)
    assert np.allclose(loaded.currents, dataset.currents)
    assert np.allclose(loaded.periods, dataset.periods)
    assert np.allclose(loaded.weights, dataset.weights)


def test_dataset_rejects_nonpositive_rows():
    with pytest.raises(ValueError):
        PeriodDataset(currents=np.array([0.5, -0.6]), periods=np.array([4.0, 5.0]))
    with pytest.raises(ValueError):
        PeriodDataset(currents=np.array([0.5, 0.6]), periods=np.array([4.0, 0.0]))


def test_bundled_dataset_matches_reference_model(ref_beam, ref_act):
    dataset = bundled_dataset()
    assert len(dataset) == 10
    res = model_residuals((TRUE_C_TH, TRUE_LAMBDA), dataset, ref_beam, ref_act)
    assert np.max(np.abs(res)) < 1e-7  # stored at 9 significant digits


# ------------------------------------------------------------------- estimator

def test_estimator_fit_predict_score(ref_beam, ref_act):
    dataset = _make_dataset(ref_beam, ref_act)
    reg = OscillatorPeriodRegressor(beam=ref_beam, actuator=ref_act)
    reg.fit(dataset.currents.reshape(-1, 1), dataset.periods)
    assert reg.c_th_ == pytest.approx(TRUE_C_TH, rel=1e-3)
    assert reg.conductivity_ == pytest.approx(TRUE_LAMBDA, rel=1e-3)
    predicted = reg.predict(dataset.currents.reshape(-1, 1))
    assert np.allclose(predicted, dataset.periods, rtol=1e-6)
    assert reg.score(dataset.currents.reshape(-1, 1), dataset.periods) > 1 - 1e-9
    # below the fitted bound the device does not oscillate
    assert math.isnan(reg.predict([[0.40]])[0])


def test_estimator_get_params_round_trip(ref_beam, ref_act):
    reg = OscillatorPeriodRegressor(beam=ref_beam, actuator=ref_act,
                                    c_th_init=0.02)
    params = reg.get_params()
    assert params["c_th_init"] == 0.02
    clone = OscillatorPeriodRegressor(**params)
    assert clone.get_params() == params


def test_estimator_requires_design(ref_beam):
    reg = OscillatorPeriodRegressor()
    with pytest.raises(ValueError):
        reg.fit([[0.6]], [4.0])
