"""Event-driven simulation of the coupled two-switch oscillator.

The thermal states evolve by the exact first-order closed form, so the
fixed time step only controls sampling; snap instants are pinned by
bisection on the continuous-time fold condition.  The beam is quasi-static:
at every instant it sits at the force equilibrium of its current branch,
and crossing a fold (no equilibrium left on the branch) flips the branch
and both switches.

Two distinct failure modes end an oscillation:

* below the current bound the powered actuator saturates short of the
  fold and no snap ever happens (detected by a no-snap watchdog window);
* well above the operating envelope the strokes shorten geometrically as
  residual heat accumulates, an accumulation of infinitely many snaps in
  finite time.  When snap spacing collapses below ``ZENO_INTERVAL`` the
  run is declared stalled with the beam parked between the two folds,
  which is how the physical device fails (both actuators pulling at
  once).  Past that point both contacts are open and both coils cool.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .beam import BeamCurve, build_beam_curve
from .core import OscillatorConfig, oscillation_period
from .errors import InsufficientCycles, NoConvergence, NoOscillation
from .thermal import ActuatorThermalState

EVENT_TIME_TOL = 1e-6    # s, bisection width for locating a snap instant
ZENO_INTERVAL = 1e-5     # s, snap spacing treated as a collapsed (stalled) run
MAX_FLIPS_PER_STEP = 64  # safety cap, only reachable in degenerate configs
RESIDUAL_TOL = 1e-12     # N, equilibrium force residual
_EQ_MAX_ITER = 60


@dataclass(frozen=True)
class SnapEvent:
    time: float
    direction: str  # "thru" (branch 1 -> 2) or "back" (branch 2 -> 1)


@dataclass(frozen=True)
class OscillatorState:
    """Instantaneous state.  During a configured snap transit and after a
    stall both switches read open; otherwise exactly one is closed and it
    matches the branch."""

    time: float
    T1: float
    T2: float
    branch: int
    w: float
    switch_1_closed: bool
    switch_2_closed: bool
    # continuation bookkeeping (defaults describe plain on-branch motion)
    in_snap_until: float = -math.inf  # end of the current snap transit
    snap_from_w: float = 0.0          # fold the transit started from
    snap_started: float = 0.0
    prev_snap_time: float = -math.inf
    stalled: bool = False

    def actuator_states(self) -> tuple[ActuatorThermalState, ActuatorThermalState]:
        return (ActuatorThermalState(self.T1, self.switch_1_closed),
                ActuatorThermalState(self.T2, self.switch_2_closed))


@dataclass(frozen=True)
class Trace:
    """Uniformly sampled run history plus the snap event log."""

    time: np.ndarray
    w: np.ndarray
    T1: np.ndarray
    T2: np.ndarray
    branch: np.ndarray
    switch_1_closed: np.ndarray
    switch_2_closed: np.ndarray
    I1: np.ndarray
    I2: np.ndarray
    events: tuple[SnapEvent, ...]


@dataclass(frozen=True)
class RunSummary:
    periods: tuple[float, ...]   # per-cycle periods after transient discard
    mean_period: float | None
    stall: bool
    stall_position: float | None  # mm, where the beam came to rest
    cycle_count: int


class OscillatorModel:
    """Precompiled view of a config: beam curve, per-branch force balance
    and thermal constants.  Immutable once built; safe to share."""

    def __init__(self, config: OscillatorConfig):
        self.config = config
        self.curve: BeamCurve = build_beam_curve(config.beam)
        self.t_env = config.env.temperature
        # branch index -> (segment, active actuator, opposing actuator)
        self._branches = {
            1: (self.curve.branch_1, config.actuator_1, config.actuator_2),
            2: (self.curve.branch_2, config.actuator_2, config.actuator_1),
        }
        # resting point of a stalled beam: between the two folds
        self.stall_rest_position = 0.5 * (config.beam.w_snap_thru
                                          + config.beam.w_snap_back)

    def _delta_temps(self, branch: int, T1: float, T2: float) -> tuple[float, float]:
        if branch == 1:
            return T1 - self.t_env, T2 - self.t_env
        return T2 - self.t_env, T1 - self.t_env

    def _net_canonical(self, branch: int, v: float,
                       dt_active: float, dt_opp: float) -> float:
        seg, act_a, act_o = self._branches[branch]
        pull = act_a.thermal_coeff * dt_active + act_a.stiffness * (v - seg.v0)
        if pull < 0.0:
            pull = 0.0  # a slack coil cannot push
        opp = act_o.thermal_coeff * dt_opp + act_o.stiffness * (-v - seg.v0)
        if opp < 0.0:
            opp = 0.0
        return pull - opp - seg.force(v)

    def _net_slope(self, branch: int, v: float,
                   dt_active: float, dt_opp: float) -> float:
        seg, act_a, act_o = self._branches[branch]
        slope = -seg.slope(v)
        if act_a.thermal_coeff * dt_active + act_a.stiffness * (v - seg.v0) > 0.0:
            slope += act_a.stiffness
        if act_o.thermal_coeff * dt_opp + act_o.stiffness * (-v - seg.v0) > 0.0:
            slope += act_o.stiffness
        return slope

    def net_force(self, branch: int, w: float, T1: float, T2: float) -> float:
        """Signed net force along the branch's driving direction."""
        dt_a, dt_o = self._delta_temps(branch, T1, T2)
        return self._net_canonical(branch, self.curve.canonical(branch, w),
                                   dt_a, dt_o)

    def fold_margin(self, branch: int, T1: float, T2: float) -> float:
        """Net driving force at the fold; positive means the fold is crossed."""
        seg, _, _ = self._branches[branch]
        dt_a, dt_o = self._delta_temps(branch, T1, T2)
        return self._net_canonical(branch, seg.v1, dt_a, dt_o)

    def solve_equilibrium(self, branch: int, T1: float, T2: float,
                          w_hint: float | None = None) -> float | None:
        """Quasi-static beam position on the branch, or None when the fold
        is crossed (no equilibrium remains on the branch).

        Newton from the previous position with a bracketed fallback; the
        net force is strictly decreasing along the branch so the root is
        unique.  An equilibrium pushed behind the stable point (only
        possible with a strongly engaged opposing coil) is clamped there.
        """
        seg, _, _ = self._branches[branch]
        dt_a, dt_o = self._delta_temps(branch, T1, T2)
        v0, v1 = seg.v0, seg.v1
        if self._net_canonical(branch, v0, dt_a, dt_o) <= 0.0:
            return self.curve.canonical(branch, v0)  # parked at the stable point
        if self._net_canonical(branch, v1, dt_a, dt_o) > 0.0:
            return None
        v = self.curve.canonical(branch, w_hint) if w_hint is not None else 0.5 * (v0 + v1)
        v = min(max(v, v0), v1)
        for _ in range(_EQ_MAX_ITER):
            g = self._net_canonical(branch, v, dt_a, dt_o)
            if abs(g) < RESIDUAL_TOL:
                return self.curve.canonical(branch, v)
            d = self._net_slope(branch, v, dt_a, dt_o)
            if d >= -1e-300:
                break
            v_next = v - g / d
            if not (v0 <= v_next <= v1):
                break
            if v_next == v:
                return self.curve.canonical(branch, v)
            v = v_next
        try:
            v = brentq(lambda x: self._net_canonical(branch, x, dt_a, dt_o),
                       v0, v1, xtol=1e-13, maxiter=200)
        except RuntimeError as exc:  # pragma: no cover - needs a malformed curve
            raise NoConvergence(f"equilibrium solve failed on branch {branch}") from exc
        return self.curve.canonical(branch, v)

    def initial_state(self) -> OscillatorState:
        """Cold start: both coils at ambient, branch 1, beam at its stable point."""
        return OscillatorState(time=0.0, T1=self.t_env, T2=self.t_env,
                               branch=1, w=self.config.beam.w_rise,
                               switch_1_closed=True, switch_2_closed=False)


def solve_equilibrium(branch: int, T1: float, T2: float,
                      model: OscillatorModel) -> float | None:
    return model.solve_equilibrium(branch, T1, T2)


def _as_model(model_or_config) -> OscillatorModel:
    if isinstance(model_or_config, OscillatorModel):
        return model_or_config
    return OscillatorModel(model_or_config)


def _heat(T: float, t_env: float, power_rise: float, decay_rate: float,
          dt: float) -> float:
    # exact step of the first-order balance; power_rise = I^2 R / lambda
    t_eq = t_env + power_rise
    return t_eq + (T - t_eq) * math.exp(-decay_rate * dt)


def step(state: OscillatorState, dt: float, model_or_config) -> tuple[OscillatorState, list[SnapEvent]]:
    """Advance one fixed step, emitting any snap events that occur inside it.

    Temperatures advance exactly under the switch-routed currents, the
    branch equilibrium is re-solved, and a crossed fold is located by
    bisection on the step interval before flipping branch and switches.
    Multiple events inside one step are processed in order.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be > 0, got {dt!r}")
    model = _as_model(model_or_config)
    cfg = model.config
    t_env = model.t_env
    supply = cfg.current
    # per-side thermal constants
    rise1 = supply * supply * cfg.actuator_1.resistance / cfg.actuator_1.conductivity
    rise2 = supply * supply * cfg.actuator_2.resistance / cfg.actuator_2.conductivity
    rate1 = cfg.actuator_1.conductivity / cfg.actuator_1.thermal_mass
    rate2 = cfg.actuator_2.conductivity / cfg.actuator_2.thermal_mass

    t = state.time
    t_stop = state.time + dt
    T1, T2 = state.T1, state.T2
    branch = state.branch
    stalled = state.stalled
    dwell_until = state.in_snap_until
    snap_from_w = state.snap_from_w
    snap_started = state.snap_started
    prev_snap = state.prev_snap_time
    w_hint = state.w
    events: list[SnapEvent] = []
    flips = 0

    def advance(T1_, T2_, powered: int, h: float) -> tuple[float, float]:
        # powered: 0 = neither (transit/stall), 1 or 2 = that side
        a = _heat(T1_, t_env, rise1 if powered == 1 else 0.0, rate1, h)
        b = _heat(T2_, t_env, rise2 if powered == 2 else 0.0, rate2, h)
        return a, b

    while t < t_stop - 1e-15 * max(1.0, t_stop):
        if stalled:
            T1, T2 = advance(T1, T2, 0, t_stop - t)
            t = t_stop
            break
        if dwell_until > t:
            seg_end = min(dwell_until, t_stop)
            T1, T2 = advance(T1, T2, 0, seg_end - t)
            t = seg_end
            continue
        powered = branch
        margin_now = model.fold_margin(branch, T1, T2)
        if margin_now <= 0.0:
            T1c, T2c = advance(T1, T2, powered, t_stop - t)
            if model.fold_margin(branch, T1c, T2c) <= 0.0:
                T1, T2 = T1c, T2c
                t = t_stop
                break
            # fold crossed somewhere in (t, t_stop]: bisect the crossing time
            lo, hi = 0.0, t_stop - t
            while hi - lo > EVENT_TIME_TOL:
                mid = 0.5 * (lo + hi)
                m1, m2 = advance(T1, T2, powered, mid)
                if model.fold_margin(branch, m1, m2) > 0.0:
                    hi = mid
                else:
                    lo = mid
            T1, T2 = advance(T1, T2, powered, hi)
            t = t + hi
        # snap fires at time t
        if t - prev_snap < ZENO_INTERVAL or flips >= MAX_FLIPS_PER_STEP:
            # collapsed snap spacing: residual heat has caught up with the
            # snap temperature on both sides; park the beam between folds
            stalled = True
            continue
        direction = "thru" if branch == 1 else "back"
        events.append(SnapEvent(time=t, direction=direction))
        prev_snap = t
        flips += 1
        fold_w = model.curve.domain(branch)[1 if branch == 1 else 0]
        branch = 2 if branch == 1 else 1
        w_hint = model.config.beam.w_rise if branch == 1 else -model.config.beam.w_rise
        if cfg.snap_duration > 0.0:
            dwell_until = t + cfg.snap_duration
            snap_from_w = fold_w
            snap_started = t

    # finalize the sampled quantities at t_stop
    if stalled:
        w = model.stall_rest_position
        sw1 = sw2 = False
        dwell_until = -math.inf
    elif dwell_until > t_stop - 1e-15 * max(1.0, t_stop):
        frac = (t_stop - snap_started) / cfg.snap_duration
        target = model.solve_equilibrium(branch, T1, T2, w_hint)
        if target is None:
            lo_w, hi_w = model.curve.domain(branch)
            target = hi_w if branch == 1 else lo_w
        w = snap_from_w + frac * (target - snap_from_w)
        sw1 = sw2 = False
    else:
        w = model.solve_equilibrium(branch, T1, T2, w_hint)
        if w is None:  # pragma: no cover - excluded by the fold bisection
            raise NoConvergence("equilibrium lost without a detected fold")
        sw1, sw2 = branch == 1, branch == 2
        dwell_until = -math.inf

    new_state = OscillatorState(
        time=t_stop, T1=T1, T2=T2, branch=branch, w=w,
        switch_1_closed=sw1, switch_2_closed=sw2,
        in_snap_until=dwell_until, snap_from_w=snap_from_w,
        snap_started=snap_started, prev_snap_time=prev_snap, stalled=stalled)
    return new_state, events


def run(config: OscillatorConfig, t_end: float, dt: float,
        transient_cycles: int = 3) -> tuple[Trace, RunSummary]:
    """Simulate from a cold start and summarize.

    Deterministic: identical inputs give bit-identical traces.  A stall is
    declared either when snap spacing collapses (see module docstring) or
    when no snap occurs for ``max(5 x analytic period, 30 s)`` of simulated
    time, measured from the start or from the last snap.
    """
    if t_end <= 0.0 or dt <= 0.0:
        raise ValueError("t_end and dt must be > 0")
    model = OscillatorModel(config)
    try:
        watchdog = max(5.0 * oscillation_period(config), 30.0)
    except NoOscillation:
        watchdog = 30.0

    state = model.initial_state()
    n_steps = max(1, int(round(t_end / dt)))
    supply = config.current

    cols_t = [0.0]
    cols_w = [state.w]
    cols_T1 = [state.T1]
    cols_T2 = [state.T2]
    cols_branch = [state.branch]
    cols_sw1 = [state.switch_1_closed]
    cols_sw2 = [state.switch_2_closed]
    events: list[SnapEvent] = []
    stall = False
    stall_position: float | None = None

    for _ in range(n_steps):
        state, new_events = step(state, dt, model)
        events.extend(new_events)
        cols_t.append(state.time)
        cols_w.append(state.w)
        cols_T1.append(state.T1)
        cols_T2.append(state.T2)
        cols_branch.append(state.branch)
        cols_sw1.append(state.switch_1_closed)
        cols_sw2.append(state.switch_2_closed)
        if not stall:
            if state.stalled:
                stall = True
                stall_position = state.w
            else:
                last = events[-1].time if events else 0.0
                if state.time - last > watchdog:
                    stall = True
                    stall_position = state.w

    sw1 = np.asarray(cols_sw1, dtype=bool)
    sw2 = np.asarray(cols_sw2, dtype=bool)
    trace = Trace(
        time=np.asarray(cols_t), w=np.asarray(cols_w),
        T1=np.asarray(cols_T1), T2=np.asarray(cols_T2),
        branch=np.asarray(cols_branch, dtype=np.int64),
        switch_1_closed=sw1, switch_2_closed=sw2,
        I1=np.where(sw1, supply, 0.0), I2=np.where(sw2, supply, 0.0),
        events=tuple(events))

    periods = cycle_periods(trace, transient_cycles)
    summary = RunSummary(
        periods=tuple(periods),
        mean_period=float(np.mean(periods)) if periods else None,
        stall=stall, stall_position=stall_position,
        cycle_count=len(periods))
    return trace, summary


def cycle_periods(trace: Trace, transient_cycles: int = 3) -> list[float]:
    """Per-cycle periods: intervals between successive same-direction snaps,
    with the first ``transient_cycles`` intervals of each direction dropped.
    Ordered by when each cycle started."""
    samples: list[tuple[float, float]] = []
    for direction in ("thru", "back"):
        times = [e.time for e in trace.events if e.direction == direction]
        for i in range(transient_cycles + 1, len(times)):
            samples.append((times[i - 1], times[i] - times[i - 1]))
    samples.sort()
    return [p for _, p in samples]


def measure_period(trace: Trace, transient_cycles: int = 3) -> float:
    """Mean oscillation period of a trace, past the startup transient."""
    periods = cycle_periods(trace, transient_cycles)
    if not periods:
        raise InsufficientCycles(
            f"need more than {transient_cycles + 1} same-direction snaps, "
            f"trace has {len(trace.events)} events")
    return float(np.mean(periods))


@dataclass(frozen=True)
class PatternTimeline:
    """Two-channel on/off timeline, one channel per switch-driven circuit."""

    time: np.ndarray
    pattern_1: np.ndarray  # 1 while switch 1 conducts
    pattern_2: np.ndarray

    def duty_cycles(self) -> tuple[float, float]:
        return (float(np.mean(self.pattern_1)), float(np.mean(self.pattern_2)))


def export_pattern_timeline(trace: Trace) -> PatternTimeline:
    return PatternTimeline(
        time=trace.time.copy(),
        pattern_1=trace.switch_1_closed.astype(np.int8),
        pattern_2=trace.switch_2_closed.astype(np.int8))


_TRACE_HEADER = ["t_s", "w_mm", "T1_C", "T2_C", "branch", "sw1", "sw2",
                 "I1_A", "I2_A"]


def write_trace_csv(trace: Trace, path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(_TRACE_HEADER)
        for i in range(len(trace.time)):
            writer.writerow([
                f"{trace.time[i]:.9g}", f"{trace.w[i]:.9g}",
                f"{trace.T1[i]:.9g}", f"{trace.T2[i]:.9g}",
                int(trace.branch[i]),
                int(trace.switch_1_closed[i]), int(trace.switch_2_closed[i]),
                f"{trace.I1[i]:.9g}", f"{trace.I2[i]:.9g}"])


def write_events_csv(trace: Trace, path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["t_s", "event", "direction"])
        for event in trace.events:
            writer.writerow([f"{event.time:.9g}", "snap", event.direction])
