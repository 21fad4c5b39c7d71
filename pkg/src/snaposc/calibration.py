"""Fit thermal parameters to period-vs-current data and invert single points.

The forward model is the closed-form period; the two fitted parameters are
the actuator's thermal mass and conductivity.  Currents below the snap
bound get a large finite penalty so the least-squares objective stays
continuous and the optimizer can climb back into the feasible region.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, replace
from importlib import resources

import numpy as np
from scipy.optimize import least_squares
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .core import (ActuatorParams, BeamCharacteristics, min_current,
                   pull_time, snap_delta_temperature, snap_force_budget)
from .errors import DegenerateDataset, Infeasible, NoOscillation

#: currents within this relative margin count as infeasible for the penalty
_PENALTY_SCALE = 10.0


@dataclass(frozen=True)
class PeriodDataset:
    """Measured oscillation periods at a set of supply currents."""

    currents: np.ndarray        # A
    periods: np.ndarray         # s
    weights: np.ndarray | None = None

    def __post_init__(self) -> None:
        currents = np.asarray(self.currents, dtype=float)
        periods = np.asarray(self.periods, dtype=float)
        object.__setattr__(self, "currents", currents)
        object.__setattr__(self, "periods", periods)
        if currents.ndim != 1 or currents.shape != periods.shape:
            raise ValueError("currents and periods must be 1-d and equal length")
        if not (np.all(np.isfinite(currents)) and np.all(currents > 0.0)):
            raise ValueError("currents must be finite and > 0")
        if not (np.all(np.isfinite(periods)) and np.all(periods > 0.0)):
            raise ValueError("periods must be finite and > 0")
        if self.weights is not None:
            weights = np.asarray(self.weights, dtype=float)
            object.__setattr__(self, "weights", weights)
            if weights.shape != currents.shape:
                raise ValueError("weights must match currents in length")
            if not (np.all(np.isfinite(weights)) and np.all(weights > 0.0)):
                raise ValueError("weights must be finite and > 0")

    def __len__(self) -> int:
        return int(self.currents.size)

    @classmethod
    def from_csv(cls, path) -> "PeriodDataset":
        """Read ``current_A,period_s[,weight]`` rows."""
        currents, periods, weights = [], [], []
        with open(path, newline="") as f:
            reader = csv.reader(f)
            header = next(reader, None)
            if header is None or [h.strip() for h in header[:2]] != ["current_A", "period_s"]:
                raise ValueError(f"{path}: expected header current_A,period_s[,weight]")
            has_weight = len(header) >= 3 and header[2].strip() == "weight"
            for row in reader:
                if not row:
                    continue
                currents.append(float(row[0]))
                periods.append(float(row[1]))
                if has_weight:
                    weights.append(float(row[2]))
        return cls(currents=np.array(currents), periods=np.array(periods),
                   weights=np.array(weights) if weights else None)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            if self.weights is None:
                writer.writerow(["current_A", "period_s"])
                for i, p in zip(self.currents, self.periods):
                    writer.writerow([f"{i:.9g}", f"{p:.9g}"])
            else:
                writer.writerow(["current_A", "period_s", "weight"])
                for i, p, w in zip(self.currents, self.periods, self.weights):
                    writer.writerow([f"{i:.9g}", f"{p:.9g}", f"{w:.9g}"])


@dataclass(frozen=True)
class FitResult:
    c_th: float                   # W s/degC
    conductivity: float           # W/degC
    rss: float
    residuals: np.ndarray         # model minus observed, per point
    r_squared: float
    converged: bool
    iterations: int               # forward-model evaluations used

    def report(self) -> dict:
        return {
            "thermal_mass_Ws_per_C": self.c_th,
            "conductivity_W_per_C": self.conductivity,
            "residual_sum_of_squares": self.rss,
            "r_squared": self.r_squared,
            "converged": self.converged,
            "iterations": self.iterations,
            "residuals": [float(r) for r in self.residuals],
        }

    def save_report(self, path) -> None:
        with open(path, "w") as f:
            json.dump(self.report(), f, indent=2)
            f.write("\n")


def _with_thermal(act: ActuatorParams, c_th: float, conductivity: float) -> ActuatorParams:
    return replace(act, thermal_mass=c_th, conductivity=conductivity)


def _symmetric_period(current: float, beam: BeamCharacteristics,
                      act: ActuatorParams, include_snap: bool,
                      snap_duration: float) -> float:
    total = pull_time(current, beam, act, "thru") + pull_time(current, beam, act, "back")
    if include_snap:
        total += 2.0 * snap_duration
    return total


def model_residuals(theta: tuple[float, float], dataset: PeriodDataset,
                    beam: BeamCharacteristics, act: ActuatorParams,
                    include_snap: bool = False,
                    snap_duration: float = 0.0) -> np.ndarray:
    """Residual vector (model period minus observed) under trial parameters.

    Points at or below the trial oscillation bound contribute a finite
    penalty, 10x the largest observed period and growing the further the
    current sits below the bound, joined continuously at the bound by
    capping the model period at the same level.
    """
    c_th, conductivity = theta
    if not (c_th > 0.0 and conductivity > 0.0):
        raise ValueError(f"theta must be positive, got {theta!r}")
    trial = _with_thermal(act, c_th, conductivity)
    bound = max(min_current(beam, trial, "thru"), min_current(beam, trial, "back"))
    penalty = _PENALTY_SCALE * float(np.max(dataset.periods))
    out = np.empty(len(dataset))
    for j, (current, observed) in enumerate(zip(dataset.currents, dataset.periods)):
        if current > bound:
            model = min(_symmetric_period(current, beam, trial, include_snap,
                                          snap_duration), penalty)
        else:
            model = penalty * (1.0 + (bound - current) / bound)
        out[j] = model - observed
    if dataset.weights is not None:
        out *= np.sqrt(dataset.weights)
    return out


def _data_informed_init(dataset: PeriodDataset, beam: BeamCharacteristics,
                        act: ActuatorParams) -> tuple[float, float]:
    """Start that is always inside the smooth feasible basin: conductivity
    chosen so the implied bound sits below every dataset current, thermal
    mass matched to the slowest observed point (pull time is linear in it)."""
    i_low = float(np.min(dataset.currents))
    budget = max(snap_force_budget(beam, act, "thru"),
                 snap_force_budget(beam, act, "back"))
    lam0 = (0.8 * i_low) ** 2 * act.thermal_coeff * act.resistance / budget
    j = int(np.argmax(dataset.periods))
    unit_mass = _with_thermal(act, 1.0, lam0)
    halves = (pull_time(float(dataset.currents[j]), beam, unit_mass, "thru")
              + pull_time(float(dataset.currents[j]), beam, unit_mass, "back"))
    return float(dataset.periods[j]) / halves, lam0


def fit_thermal_params(dataset: PeriodDataset, init: tuple[float, float],
                       beam: BeamCharacteristics, act: ActuatorParams,
                       include_snap: bool = False, snap_duration: float = 0.0,
                       max_nfev: int = 2000) -> FitResult:
    """Least-squares fit of (thermal mass, conductivity) to a dataset.

    Damped least squares with finite-difference sensitivities, run over
    the log of both parameters so they stay positive.  Stops when the
    relative step falls below 1e-10 or the gradient norm below 1e-12; if
    the evaluation budget runs out first the best point so far is
    returned with ``converged`` unset.

    The requested init can park the optimizer on the kink where points
    cross in and out of feasibility, so a second, data-informed start is
    always tried as well and the lower-RSS solution wins; a short
    Gauss-Newton polish then pins first-order optimality well below the
    step tolerance.

    Raises DegenerateDataset when fewer than two distinct currents are
    present or every current sits below the bound implied by ``init``.
    """
    if len(np.unique(dataset.currents)) < 2:
        raise DegenerateDataset("need at least 2 distinct currents for a 2-parameter fit")
    c0, l0 = init
    if not (c0 > 0.0 and l0 > 0.0):
        raise ValueError(f"init must be positive, got {init!r}")
    trial = _with_thermal(act, c0, l0)
    init_bound = max(min_current(beam, trial, "thru"),
                     min_current(beam, trial, "back"))
    if np.all(dataset.currents <= init_bound):
        raise DegenerateDataset(
            f"all dataset currents lie at or below the initial oscillation "
            f"bound {init_bound:.4g} A; the model cannot see these points")

    def objective(u: np.ndarray) -> np.ndarray:
        # clamp the exponent so wild trial steps stay evaluable; the
        # penalty ramp then walks the optimizer back into range
        theta = (math.exp(min(max(u[0], -60.0), 60.0)),
                 math.exp(min(max(u[1], -60.0), 60.0)))
        return model_residuals(theta, dataset, beam, act, include_snap,
                               snap_duration)

    def solve_from(c_init: float, l_init: float):
        result = least_squares(objective, x0=[math.log(c_init), math.log(l_init)],
                               method="lm", xtol=1e-10, gtol=1e-12, ftol=1e-15,
                               max_nfev=max_nfev)
        u = np.clip(result.x, -60.0, 60.0)
        evals = int(result.nfev)
        for _ in range(3):
            r0 = objective(u)
            jac = np.empty((r0.size, 2))
            h = 1e-7
            for j in range(2):
                probe = u.copy()
                probe[j] += h
                jac[:, j] = (objective(probe) - r0) / h
            delta, *_ = np.linalg.lstsq(jac, -r0, rcond=None)
            evals += 4
            if not np.all(np.isfinite(delta)):
                break
            candidate = u + delta
            r1 = objective(candidate)
            if np.dot(r1, r1) < np.dot(r0, r0):
                u = candidate
            else:
                break
        r_final = objective(u)
        return u, float(np.dot(r_final, r_final)), bool(result.status > 0), evals

    u_best, rss_w, converged, evals = solve_from(c0, l0)
    try:
        c_alt, l_alt = _data_informed_init(dataset, beam, act)
        u_alt, rss_alt, converged_alt, evals_alt = solve_from(c_alt, l_alt)
        evals += evals_alt
        if rss_alt < rss_w:
            u_best, converged = u_alt, converged_alt
    except NoOscillation:  # pragma: no cover - heuristic start is feasible
        pass

    c_fit, l_fit = math.exp(u_best[0]), math.exp(u_best[1])
    residuals = model_residuals((c_fit, l_fit), dataset, beam, act,
                                include_snap, snap_duration)
    rss = float(np.dot(residuals, residuals))
    tss = float(np.sum((dataset.periods - np.mean(dataset.periods)) ** 2))
    r_squared = 1.0 - rss / tss if tss > 0.0 else math.nan
    return FitResult(c_th=c_fit, conductivity=l_fit, rss=rss,
                     residuals=residuals, r_squared=r_squared,
                     converged=converged, iterations=evals)


def infer_conductivity(point: tuple[float, float], c_th: float,
                       beam: BeamCharacteristics, act: ActuatorParams) -> float:
    """Conductivity that reproduces one (current, period) operating point
    with the thermal mass held fixed.

    The period is strictly increasing in conductivity, from the zero-loss
    limit ``c_th (dT_thru + dT_back) / (I^2 R)`` up to infinity at the
    value where the current equals the snap bound, so a bisection bracket
    always contains exactly one solution.  Resolved to 1e-9 relative.

    Raises Infeasible when the requested period is at or below the
    zero-loss limit: no conductivity makes the oscillator that fast.
    """
    current, period = point
    if not (current > 0.0 and period > 0.0):
        raise ValueError(f"operating point must be positive, got {point!r}")
    if c_th <= 0.0:
        raise ValueError(f"c_th must be positive, got {c_th!r}")
    heating = current * current * act.resistance
    floor = c_th * (snap_delta_temperature(beam, act, "thru")
                    + snap_delta_temperature(beam, act, "back")) / heating
    if period <= floor:
        raise Infeasible(
            f"period {period} s is at or below the zero-conductivity limit "
            f"{floor:.6g} s at {current} A")
    budget = max(snap_force_budget(beam, act, "thru"),
                 snap_force_budget(beam, act, "back"))
    lam_max = act.thermal_coeff * heating / budget

    def forward(lam: float) -> float:
        trial = _with_thermal(act, c_th, lam)
        return _symmetric_period(current, beam, trial, include_snap=False,
                                 snap_duration=0.0)

    lo = lam_max * 1e-12
    hi = lam_max * (1.0 - 1e-12)
    if forward(lo) >= period:  # pragma: no cover - floor check excludes this
        raise Infeasible("period below the reachable range")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        try:
            high_side = forward(mid) >= period
        except NoOscillation:
            high_side = True
        if high_side:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-12 * hi:
            break
    return 0.5 * (lo + hi)


def bundled_dataset() -> PeriodDataset:
    """Synthetic period-vs-current table generated from the reference
    design's closed-form model; ships with the package as a fit demo."""
    path = resources.files("snaposc").joinpath("data/synthetic_period_vs_current.csv")
    with resources.as_file(path) as p:
        return PeriodDataset.from_csv(p)


class OscillatorPeriodRegressor(RegressorMixin, BaseEstimator):
    """Estimator-style front end to the thermal fit.

    ``fit`` takes supply currents as the single feature and observed
    periods as the target, recovers the thermal pair, and ``predict``
    evaluates the fitted closed-form period.  Composes with scikit-learn
    model-selection utilities; parameters follow the usual get/set
    contract.

    Currents at or below the fitted oscillation bound predict NaN, since
    the device does not oscillate there.
    """

    def __init__(self, beam: BeamCharacteristics | None = None,
                 actuator: ActuatorParams | None = None,
                 c_th_init: float = 1e-2, conductivity_init: float = 1e-2,
                 include_snap: bool = False, snap_duration: float = 0.0,
                 max_nfev: int = 2000):
        self.beam = beam
        self.actuator = actuator
        self.c_th_init = c_th_init
        self.conductivity_init = conductivity_init
        self.include_snap = include_snap
        self.snap_duration = snap_duration
        self.max_nfev = max_nfev

    def _currents(self, X) -> np.ndarray:
        X = check_array(X, ensure_2d=False, dtype=float)
        if X.ndim == 2:
            if X.shape[1] != 1:
                raise ValueError("expected a single feature column of currents")
            X = X[:, 0]
        return X

    def fit(self, X, y, sample_weight=None):
        if self.beam is None or self.actuator is None:
            raise ValueError("beam and actuator must be provided to fit")
        X, y = check_X_y(X, y, ensure_2d=False, dtype=float)
        dataset = PeriodDataset(currents=self._currents(X), periods=np.asarray(y),
                                weights=sample_weight)
        result = fit_thermal_params(dataset, (self.c_th_init, self.conductivity_init),
                                    self.beam, self.actuator,
                                    include_snap=self.include_snap,
                                    snap_duration=self.snap_duration,
                                    max_nfev=self.max_nfev)
        self.c_th_ = result.c_th
        self.conductivity_ = result.conductivity
        self.fit_result_ = result
        self.n_features_in_ = 1
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "c_th_")
        currents = self._currents(X)
        trial = _with_thermal(self.actuator, self.c_th_, self.conductivity_)
        out = np.empty(currents.shape)
        for j, current in enumerate(currents):
            try:
                out[j] = _symmetric_period(current, self.beam, trial,
                                           self.include_snap, self.snap_duration)
            except NoOscillation:
                out[j] = math.nan
        return out
