"""JSON configuration files: schema, validation, defaults.

Field names carry their units; there is no unit inference anywhere.
Validation errors name the offending field by path (``beam.w_rise_mm``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .core import (ActuatorParams, BeamCharacteristics, Environment,
                   OscillatorConfig)
from .errors import ConfigError

SCHEMA_VERSION = 1

_ACTUATOR_KEYS = {
    "resistance_ohm": "resistance",
    "stiffness_N_per_mm": "stiffness",
    "thermal_coeff_N_per_C": "thermal_coeff",
    "thermal_mass_Ws_per_C": "thermal_mass",
    "conductivity_W_per_C": "conductivity",
    "length_mm": "length",
}
_BEAM_KEYS = {
    "w_rise_mm": "w_rise",
    "w_snap_thru_mm": "w_snap_thru",
    "w_snap_back_mm": "w_snap_back",
    "F_snap_thru_N": "f_snap_thru",
    "F_snap_back_N": "f_snap_back",
}
_BEAM_OPTIONAL = {"F_snap_back_N"}


@dataclass(frozen=True)
class SimulationSettings:
    dt: float = 1e-3            # s
    t_end: float = 60.0         # s
    snap_duration: float = 0.0  # s, also copied onto the oscillator config
    transient_cycles: int = 3

    def __post_init__(self) -> None:
        if self.dt <= 0.0:
            raise ValueError(f"dt_s must be > 0, got {self.dt!r}")
        if self.t_end <= 0.0:
            raise ValueError(f"t_end_s must be > 0, got {self.t_end!r}")
        if self.snap_duration < 0.0:
            raise ValueError(f"snap_duration_s must be >= 0, got {self.snap_duration!r}")
        if self.transient_cycles < 0 or self.transient_cycles != int(self.transient_cycles):
            raise ValueError("transient_cycles must be a non-negative integer")


@dataclass(frozen=True)
class ToolConfig:
    """Everything a command needs: oscillator plus run settings."""

    oscillator: OscillatorConfig
    simulation: SimulationSettings


def default_config_dict() -> dict:
    """Built-in reference design: the published 69 mm prototype values."""
    return {
        "schema_version": SCHEMA_VERSION,
        "actuator": {
            "resistance_ohm": 3.8,
            "stiffness_N_per_mm": -0.28,
            "thermal_coeff_N_per_C": 0.016,
            "thermal_mass_Ws_per_C": 0.0299,
            "conductivity_W_per_C": 0.0231,
            "length_mm": 69.0,
        },
        "beam": {
            "w_rise_mm": -2.12,
            "w_snap_thru_mm": -0.89,
            "w_snap_back_mm": 0.89,
            "F_snap_thru_N": 0.42,
            "F_snap_back_N": 0.42,
        },
        "environment": {"T_env_C": 22.0, "label": "forced-air"},
        "drive": {"current_A": 0.60},
        "simulation": {"dt_s": 1e-3, "t_end_s": 60.0, "snap_duration_s": 0.0,
                       "transient_cycles": 3},
    }


def _require_number(section: dict, key: str, path: str, optional: bool = False):
    if key not in section:
        if optional:
            return None
        raise ConfigError(f"{path}.{key}: required field is missing")
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}.{key}: expected a number, got {value!r}")
    return float(value)


def _check_unknown(section: dict, allowed: set[str], path: str) -> None:
    for key in section:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}: unknown field")


def _parse_actuator(section, path: str) -> ActuatorParams:
    if not isinstance(section, dict):
        raise ConfigError(f"{path}: expected an object")
    _check_unknown(section, set(_ACTUATOR_KEYS), path)
    kwargs = {attr: _require_number(section, key, path)
              for key, attr in _ACTUATOR_KEYS.items()}
    try:
        return ActuatorParams(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _parse_beam(section, path: str) -> BeamCharacteristics:
    if not isinstance(section, dict):
        raise ConfigError(f"{path}: expected an object")
    _check_unknown(section, set(_BEAM_KEYS), path)
    kwargs = {}
    for key, attr in _BEAM_KEYS.items():
        value = _require_number(section, key, path, optional=key in _BEAM_OPTIONAL)
        if value is not None:
            kwargs[attr] = value
    try:
        return BeamCharacteristics(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def config_from_dict(doc: dict) -> ToolConfig:
    if not isinstance(doc, dict):
        raise ConfigError("top level: expected an object")
    allowed = {"schema_version", "actuator", "actuator_2", "beam",
               "environment", "drive", "simulation"}
    _check_unknown(doc, allowed, "top level")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version: unsupported version {version!r}")
    if "actuator" not in doc:
        raise ConfigError("actuator: required section is missing")
    if "beam" not in doc:
        raise ConfigError("beam: required section is missing")

    act1 = _parse_actuator(doc["actuator"], "actuator")
    act2 = _parse_actuator(doc["actuator_2"], "actuator_2") \
        if "actuator_2" in doc else act1
    beam = _parse_beam(doc["beam"], "beam")

    env_section = doc.get("environment", {})
    if not isinstance(env_section, dict):
        raise ConfigError("environment: expected an object")
    _check_unknown(env_section, {"T_env_C", "label"}, "environment")
    label = env_section.get("label", "unspecified")
    if not isinstance(label, str):
        raise ConfigError(f"environment.label: expected a string, got {label!r}")
    t_env = _require_number(env_section, "T_env_C", "environment", optional=True)
    try:
        env = Environment(temperature=t_env if t_env is not None else 22.0,
                          label=label)
    except ValueError as exc:
        raise ConfigError(f"environment: {exc}") from exc

    drive_section = doc.get("drive", {})
    if not isinstance(drive_section, dict):
        raise ConfigError("drive: expected an object")
    _check_unknown(drive_section, {"current_A"}, "drive")
    current = _require_number(drive_section, "current_A", "drive", optional=True)

    sim_section = doc.get("simulation", {})
    if not isinstance(sim_section, dict):
        raise ConfigError("simulation: expected an object")
    _check_unknown(sim_section, {"dt_s", "t_end_s", "snap_duration_s",
                                 "transient_cycles"}, "simulation")
    defaults = SimulationSettings()
    dt = _require_number(sim_section, "dt_s", "simulation", optional=True)
    t_end = _require_number(sim_section, "t_end_s", "simulation", optional=True)
    snap = _require_number(sim_section, "snap_duration_s", "simulation", optional=True)
    cycles = sim_section.get("transient_cycles", defaults.transient_cycles)
    if isinstance(cycles, bool) or not isinstance(cycles, int):
        raise ConfigError(
            f"simulation.transient_cycles: expected an integer, got {cycles!r}")
    try:
        sim = SimulationSettings(
            dt=dt if dt is not None else defaults.dt,
            t_end=t_end if t_end is not None else defaults.t_end,
            snap_duration=snap if snap is not None else defaults.snap_duration,
            transient_cycles=cycles)
    except ValueError as exc:
        raise ConfigError(f"simulation: {exc}") from exc

    try:
        oscillator = OscillatorConfig(
            actuator_1=act1, actuator_2=act2, beam=beam, env=env,
            current=current if current is not None else 0.0,
            snap_duration=sim.snap_duration)
    except ValueError as exc:
        raise ConfigError(f"drive: {exc}") from exc
    return ToolConfig(oscillator=oscillator, simulation=sim)


def config_to_dict(config: ToolConfig) -> dict:
    osc = config.oscillator
    sim = config.simulation

    def actuator_dict(act: ActuatorParams) -> dict:
        return {key: getattr(act, attr) for key, attr in _ACTUATOR_KEYS.items()}

    doc = {
        "schema_version": SCHEMA_VERSION,
        "actuator": actuator_dict(osc.actuator_1),
        "beam": {key: getattr(osc.beam, attr) for key, attr in _BEAM_KEYS.items()},
        "environment": {"T_env_C": osc.env.temperature, "label": osc.env.label},
        "drive": {"current_A": osc.current},
        "simulation": {"dt_s": sim.dt, "t_end_s": sim.t_end,
                       "snap_duration_s": sim.snap_duration,
                       "transient_cycles": sim.transient_cycles},
    }
    if osc.actuator_2 != osc.actuator_1:
        doc["actuator_2"] = actuator_dict(osc.actuator_2)
    return doc


def load_config(path) -> ToolConfig:
    with open(path) as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    return config_from_dict(doc)


def save_config(config: ToolConfig, path) -> None:
    with open(path, "w") as f:
        json.dump(config_to_dict(config), f, indent=2)
        f.write("\n")


def reference_tool_config() -> ToolConfig:
    return config_from_dict(default_config_dict())
