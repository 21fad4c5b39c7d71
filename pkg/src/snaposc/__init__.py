"""Toolkit for a self-sustained snap-through oscillator: two thermally
driven coil actuators coupled through one bistable buckled beam.

Closed-form design math lives in :mod:`snaposc.core`, the event-driven
simulation in :mod:`snaposc.simulator`, and parameter calibration in
:mod:`snaposc.calibration`.  The ``snaposc`` command exposes all of it.
"""

from .beam import BeamCurve, beam_restoring_force, build_beam_curve
from .calibration import (FitResult, OscillatorPeriodRegressor, PeriodDataset,
                          bundled_dataset, fit_thermal_params,
                          infer_conductivity, model_residuals)
from .config import (SimulationSettings, ToolConfig, load_config,
                     reference_tool_config, save_config)
from .core import (ActuatorParams, BeamCharacteristics, Environment,
                   OscillatorConfig, design_current,
                   equilibrium_temperature_rise, min_current,
                   oscillation_min_current, oscillation_period, pull_time,
                   reference_actuator, reference_beam, reference_config,
                   scale_actuator, snap_delta_temperature, snap_force_budget)
from .errors import (ConfigError, DegenerateDataset, Infeasible,
                     InsufficientCycles, InvalidCharacteristics,
                     InvalidTolerance, NoConvergence, NoOscillation,
                     OutOfBranch, SnapOscError)
from .simulator import (OscillatorModel, OscillatorState, PatternTimeline,
                        RunSummary, SnapEvent, Trace, cycle_periods,
                        export_pattern_timeline, measure_period, run,
                        solve_equilibrium, step, write_events_csv,
                        write_trace_csv)
from .thermal import (ActuatorThermalState, actuator_force, cooling_limited,
                      cooling_time, temperature_step)

__version__ = "0.1.0"

__all__ = [
    "ActuatorParams", "ActuatorThermalState", "BeamCharacteristics",
    "BeamCurve", "ConfigError", "DegenerateDataset", "Environment",
    "FitResult", "Infeasible", "InsufficientCycles", "InvalidCharacteristics",
    "InvalidTolerance", "NoConvergence", "NoOscillation", "OscillatorConfig",
    "OscillatorModel", "OscillatorPeriodRegressor", "OscillatorState",
    "OutOfBranch", "PatternTimeline", "PeriodDataset", "RunSummary",
    "SimulationSettings", "SnapEvent", "SnapOscError", "ToolConfig", "Trace",
    "actuator_force", "beam_restoring_force", "build_beam_curve",
    "bundled_dataset", "cooling_limited", "cooling_time", "cycle_periods",
    "design_current", "equilibrium_temperature_rise", "export_pattern_timeline",
    "fit_thermal_params", "infer_conductivity", "load_config",
    "measure_period", "min_current", "model_residuals",
    "oscillation_min_current", "oscillation_period", "pull_time",
    "reference_actuator", "reference_beam", "reference_config",
    "reference_tool_config", "run", "save_config", "scale_actuator",
    "snap_delta_temperature", "snap_force_budget", "solve_equilibrium",
    "step", "temperature_step", "write_events_csv", "write_trace_csv",
]
