"""Command-line front end.

Exit codes: 0 success (a stalled simulation is still a result), 2 invalid
configuration or arguments, 3 model infeasibility (no oscillation at the
requested point), 4 I/O failure.  Error class names go to stderr.
"""

from __future__ import annotations

import dataclasses
import functools
import sys
from concurrent.futures import ProcessPoolExecutor

import click

from . import calibration, config as config_mod, core, simulator, thermal
from .errors import (ConfigError, DegenerateDataset, Infeasible,
                     InsufficientCycles, InvalidCharacteristics,
                     InvalidTolerance, NoOscillation)

_INFEASIBLE = (NoOscillation, Infeasible, DegenerateDataset, InsufficientCycles)
_VALIDATION = (ConfigError, InvalidCharacteristics, InvalidTolerance, ValueError)


def _handled(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except _INFEASIBLE as exc:
            click.echo(f"{type(exc).__name__}: {exc}", err=True)
            sys.exit(3)
        except _VALIDATION as exc:
            click.echo(f"{type(exc).__name__}: {exc}", err=True)
            sys.exit(2)
        except OSError as exc:
            click.echo(f"{type(exc).__name__}: {exc}", err=True)
            sys.exit(4)
    return wrapper


@dataclasses.dataclass
class _Ctx:
    tool: config_mod.ToolConfig
    fmt: str

    def emit(self, name: str, value, unit: str) -> None:
        if self.fmt == "csv":
            click.echo(f"{name},{value:.9g},{unit}")
        else:
            click.echo(f"{value:.4g} {unit}")

    def emit_row(self, name: str, value, unit: str) -> None:
        if self.fmt == "csv":
            click.echo(f"{name},{value},{unit}")
        else:
            click.echo(f"{name}: {value} {unit}".rstrip())


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="JSON configuration file.")
@click.option("--paper-defaults", is_flag=True,
              help="Use the built-in reference design (published prototype "
                   "parameters); this is also the fallback when no config "
                   "file is given.")
@click.option("--format", "fmt", type=click.Choice(["text", "csv"]),
              default="text", show_default=True,
              help="csv emits machine-readable name,value,unit rows.")
@click.pass_context
@_handled
def main(ctx, config_path, paper_defaults, fmt):
    """Design, simulate and calibrate a two-switch snap-through oscillator."""
    if config_path is not None and not paper_defaults:
        tool = config_mod.load_config(config_path)
    else:
        tool = config_mod.reference_tool_config()
    ctx.obj = _Ctx(tool=tool, fmt=fmt)


def _oscillator(ctx: _Ctx, current: float | None,
                snap_duration: float | None = None) -> core.OscillatorConfig:
    osc = ctx.tool.oscillator
    changes = {}
    if current is not None:
        changes["current"] = current
    if snap_duration is not None:
        changes["snap_duration"] = snap_duration
    return dataclasses.replace(osc, **changes) if changes else osc


def _note_if_asymmetric(osc: core.OscillatorConfig) -> None:
    if not (osc.symmetric and osc.beam.mirror_symmetric):
        click.echo("note: asymmetric half cycles, extended model", err=True)


@main.command()
@click.option("--current", type=float, default=None, help="Supply current [A].")
@click.pass_obj
@_handled
def period(ctx: _Ctx, current):
    """Closed-form oscillation period at the configured or given current."""
    osc = _oscillator(ctx, current)
    _note_if_asymmetric(osc)
    ctx.emit("period", core.oscillation_period(osc), "s")


@main.command("pull-time")
@click.option("--current", type=float, default=None, help="Supply current [A].")
@click.option("--direction", type=click.Choice(["thru", "back"]), default="thru",
              show_default=True)
@click.pass_obj
@_handled
def pull_time_cmd(ctx: _Ctx, current, direction):
    """Heating time from ambient to the snap point of one stroke."""
    osc = _oscillator(ctx, current)
    act = osc.actuator_1 if direction == "thru" else osc.actuator_2
    ctx.emit("pull_time", core.pull_time(osc.current, osc.beam, act, direction), "s")


@main.command("min-current")
@click.option("--direction", type=click.Choice(["thru", "back", "both"]),
              default="both", show_default=True,
              help="'both' reports the oscillation bound (max of the strokes).")
@click.pass_obj
@_handled
def min_current_cmd(ctx: _Ctx, direction):
    """Lower current bound below which the oscillator cannot run."""
    osc = ctx.tool.oscillator
    if direction == "both":
        value = core.oscillation_min_current(osc)
    else:
        act = osc.actuator_1 if direction == "thru" else osc.actuator_2
        value = core.min_current(osc.beam, act, direction)
    ctx.emit("min_current", value, "A")


@main.command()
@click.option("--target-period", type=float, required=True, help="Desired period [s].")
@click.pass_obj
@_handled
def design(ctx: _Ctx, target_period):
    """Supply current that produces the target period (symmetric design)."""
    osc = ctx.tool.oscillator
    value = core.design_current(target_period, osc.beam, osc.actuator_1)
    if thermal.cooling_limited(target_period, osc.beam, osc.actuator_1):
        click.echo("warning: half period is below the passive cooling reset "
                   "heuristic, sustained oscillation may need faster cooling",
                   err=True)
    ctx.emit("design_current", value, "A")


@main.command()
@click.option("--length", type=float, required=True, help="New actuator length [mm].")
@click.pass_obj
@_handled
def scale(ctx: _Ctx, length):
    """Rescale the configured actuator to a new coil length."""
    scaled = core.scale_actuator(ctx.tool.oscillator.actuator_1, length)
    units = {"resistance": "ohm", "stiffness": "N/mm", "thermal_coeff": "N/degC",
             "thermal_mass": "Ws/degC", "conductivity": "W/degC", "length": "mm"}
    for name, unit in units.items():
        ctx.emit_row(name, f"{getattr(scaled, name):.9g}", unit)


@main.command()
@click.option("--current", type=float, default=None, help="Supply current [A].")
@click.option("--t-end", type=float, default=None, help="Simulated window [s].")
@click.option("--dt", type=float, default=None, help="Sample step [s].")
@click.option("--snap-duration", type=float, default=None,
              help="Snap transit time [s]; 0 flips instantaneously.")
@click.option("--transient-cycles", type=int, default=None,
              help="Initial cycles excluded from the period average.")
@click.option("--out-trace", type=click.Path(), default="trace.csv",
              show_default=True)
@click.option("--out-events", type=click.Path(), default="events.csv",
              show_default=True)
@click.pass_obj
@_handled
def simulate(ctx: _Ctx, current, t_end, dt, snap_duration, transient_cycles,
             out_trace, out_events):
    """Run the event-driven simulation and write trace and event CSVs."""
    sim = ctx.tool.simulation
    osc = _oscillator(ctx, current, snap_duration)
    t_end = t_end if t_end is not None else sim.t_end
    dt = dt if dt is not None else sim.dt
    cycles = transient_cycles if transient_cycles is not None else sim.transient_cycles
    trace, summary = simulator.run(osc, t_end=t_end, dt=dt, transient_cycles=cycles)
    simulator.write_trace_csv(trace, out_trace)
    simulator.write_events_csv(trace, out_events)
    mean = "n/a" if summary.mean_period is None else f"{summary.mean_period:.9g}"
    ctx.emit_row("mean_period", mean, "s")
    ctx.emit_row("cycles", summary.cycle_count, "")
    ctx.emit_row("stall", int(summary.stall), "")
    if summary.stall_position is not None:
        ctx.emit_row("stall_position", f"{summary.stall_position:.9g}", "mm")


def _sim_sweep_point(args):
    osc_fields, current, t_end, dt, cycles = args
    osc = dataclasses.replace(osc_fields, current=current)
    _, summary = simulator.run(osc, t_end=t_end, dt=dt, transient_cycles=cycles)
    period = "" if summary.mean_period is None else f"{summary.mean_period:.9g}"
    return current, period, int(summary.stall)


@main.command()
@click.option("--current-min", type=float, required=True)
@click.option("--current-max", type=float, required=True)
@click.option("--steps", type=int, required=True)
@click.option("--mode", type=click.Choice(["analytic", "sim"]), default="analytic",
              show_default=True)
@click.option("--t-end", type=float, default=None, help="Window per sim run [s].")
@click.option("--dt", type=float, default=None)
@click.option("--workers", type=int, default=1, show_default=True,
              help="Parallel processes for sim mode.")
@click.option("--out", type=click.Path(), default=None,
              help="Write the CSV here instead of stdout.")
@click.pass_obj
@_handled
def sweep(ctx: _Ctx, current_min, current_max, steps, mode, t_end, dt, workers, out):
    """Period as a function of supply current, analytic or simulated."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if not (0.0 <= current_min <= current_max):
        raise ValueError("need 0 <= current-min <= current-max")
    osc = ctx.tool.oscillator
    sim = ctx.tool.simulation
    if steps == 1:
        currents = [current_min]
    else:
        span = (current_max - current_min) / (steps - 1)
        currents = [current_min + span * i for i in range(steps)]

    rows = []
    if mode == "analytic":
        bound = core.oscillation_min_current(osc)
        for current in currents:
            if current <= bound:
                rows.append((current, "", 1))
            else:
                value = core.oscillation_period(
                    dataclasses.replace(osc, current=current))
                rows.append((current, f"{value:.9g}", 0))
    else:
        t_end = t_end if t_end is not None else sim.t_end
        dt = dt if dt is not None else sim.dt
        jobs = [(osc, c, t_end, dt, sim.transient_cycles) for c in currents]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(_sim_sweep_point, jobs))
        else:
            rows = [_sim_sweep_point(job) for job in jobs]
        rows.sort(key=lambda r: r[0])

    lines = ["current_A,period_s,stall"]
    lines += [f"{current:.9g},{period},{stall}" for current, period, stall in rows]
    text = "\n".join(lines) + "\n"
    if out is None:
        click.echo(text, nl=False)
    else:
        with open(out, "w") as f:
            f.write(text)


@main.command()
@click.option("--data", type=click.Path(), default=None,
              help="Dataset CSV (current_A,period_s[,weight]); the bundled "
                   "synthetic dataset is used when omitted.")
@click.option("--init-c-th", type=float, default=0.01, show_default=True)
@click.option("--init-conductivity", "--init-lambda", type=float, default=0.01,
              show_default=True)
@click.option("--report", type=click.Path(), default=None,
              help="Write the full fit report (JSON) here.")
@click.pass_obj
@_handled
def fit(ctx: _Ctx, data, init_c_th, init_conductivity, report):
    """Fit thermal mass and conductivity to period-vs-current data."""
    osc = ctx.tool.oscillator
    if data is None:
        dataset = calibration.bundled_dataset()
    else:
        dataset = calibration.PeriodDataset.from_csv(data)
    result = calibration.fit_thermal_params(
        dataset, (init_c_th, init_conductivity), osc.beam, osc.actuator_1)
    if report is not None:
        result.save_report(report)
    ctx.emit_row("thermal_mass", f"{result.c_th:.9g}", "Ws/degC")
    ctx.emit_row("conductivity", f"{result.conductivity:.9g}", "W/degC")
    ctx.emit_row("r_squared", f"{result.r_squared:.9g}", "")
    ctx.emit_row("converged", int(result.converged), "")


@main.command("infer-lambda")
@click.option("--current", type=float, required=True, help="Supply current [A].")
@click.option("--period", type=float, required=True, help="Observed period [s].")
@click.option("--c-th", type=float, default=None,
              help="Thermal mass to hold fixed; defaults to the configured one.")
@click.pass_obj
@_handled
def infer_lambda(ctx: _Ctx, current, period, c_th):
    """Conductivity implied by one (current, period) operating point."""
    osc = ctx.tool.oscillator
    c_th = c_th if c_th is not None else osc.actuator_1.thermal_mass
    value = calibration.infer_conductivity((current, period), c_th,
                                           osc.beam, osc.actuator_1)
    ctx.emit("conductivity", value, "W/degC")


if __name__ == "__main__":
    main()
