"""Configuration files: round trips, defaults, field-path diagnostics."""

import json

import pytest

from snaposc import ConfigError, load_config, reference_tool_config, save_config
from snaposc.config import config_from_dict, config_to_dict, default_config_dict


def test_reference_defaults_match_published_design():
    tool = reference_tool_config()
    act = tool.oscillator.actuator_1
    assert act.resistance == 3.8
    assert act.stiffness == -0.28
    assert act.thermal_coeff == 0.016
    assert act.thermal_mass == 0.0299
    assert act.conductivity == 0.0231
    assert act.length == 69.0
    assert tool.oscillator.beam.w_rise == -2.12
    assert tool.oscillator.beam.w_snap_thru == -0.89
    assert tool.oscillator.current == 0.60
    assert tool.oscillator.env.temperature == 22.0
    assert tool.simulation.dt == 1e-3
    assert tool.oscillator.actuator_2 == act


def test_round_trip_is_identity(tmp_path):
    tool = reference_tool_config()
    path = tmp_path / "config.json"
    save_config(tool, path)
    loaded = load_config(path)
    assert loaded == tool
    # and a second cycle through the dict form is also stable
    assert config_from_dict(config_to_dict(loaded)) == loaded


def test_round_trip_preserves_asymmetric_actuators(tmp_path):
    doc = default_config_dict()
    doc["actuator_2"] = dict(doc["actuator"], thermal_mass_Ws_per_C=0.0598)
    tool = config_from_dict(doc)
    assert tool.oscillator.actuator_2.thermal_mass == 0.0598
    path = tmp_path / "asym.json"
    save_config(tool, path)
    assert load_config(path) == tool


def test_optional_sections_take_defaults():
    tool = config_from_dict({
        "actuator": default_config_dict()["actuator"],
        "beam": default_config_dict()["beam"],
    })
    assert tool.simulation.t_end == 60.0
    assert tool.oscillator.env.temperature == 22.0
    assert tool.oscillator.current == 0.0


def test_snap_duration_propagates_to_oscillator():
    doc = default_config_dict()
    doc["simulation"]["snap_duration_s"] = 0.11
    tool = config_from_dict(doc)
    assert tool.oscillator.snap_duration == 0.11


def test_missing_required_field_names_path():
    doc = default_config_dict()
    del doc["actuator"]["resistance_ohm"]
    with pytest.raises(ConfigError, match=r"actuator\.resistance_ohm"):
        config_from_dict(doc)


def test_invariant_violation_names_section():
    doc = default_config_dict()
    doc["beam"]["w_snap_thru_mm"] = 0.89  # wrong side of center
    with pytest.raises(ConfigError, match="beam"):
        config_from_dict(doc)


def test_unknown_field_rejected_with_path():
    doc = default_config_dict()
    doc["actuator"]["resistance"] = 3.8
    with pytest.raises(ConfigError, match=r"actuator\.resistance"):
        config_from_dict(doc)


def test_non_numeric_value_rejected():
    doc = default_config_dict()
    doc["drive"]["current_A"] = "high"
    with pytest.raises(ConfigError, match=r"drive\.current_A"):
        config_from_dict(doc)


def test_unsupported_schema_version():
    doc = default_config_dict()
    doc["schema_version"] = 99
    with pytest.raises(ConfigError, match="schema_version"):
        config_from_dict(doc)


def test_malformed_json_reported(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(path)


def test_f_snap_back_optional(tmp_path):
    doc = default_config_dict()
    del doc["beam"]["F_snap_back_N"]
    tool = config_from_dict(doc)
    assert tool.oscillator.beam.f_snap_back == tool.oscillator.beam.f_snap_thru
