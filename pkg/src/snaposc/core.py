"""Domain types and the closed-form period model of the two-switch oscillator.

The oscillator couples two thermally driven coil actuators through one
bistable buckled beam.  Whichever actuator is powered heats up, pulls the
beam to that stroke's critical (fold) displacement and triggers a snap;
the snap opens its own contact and closes the other one, so the roles
swap every half cycle.  Everything in this module is a pure function of
its arguments.

Unit conventions used throughout the package: mm, N, degC, s, A, ohm, W.
Displacements are signed; the beam's first stable state sits at
``w_rise`` (negative in the reference design) and the second at
``-w_rise``.  A mirrored stroke is obtained by negating displacements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Literal

from .errors import InvalidCharacteristics, NoOscillation

#: Strokes, in the order the two half cycles run: actuator 1 drives
#: "thru" (state 1 -> 2), actuator 2 drives "back" (state 2 -> 1).
Direction = Literal["thru", "back"]


@dataclass(frozen=True)
class ActuatorParams:
    """Electrical, thermal and mechanical constants of one coil actuator."""

    resistance: float     # ohm
    stiffness: float      # N/mm; negative: tension drops as the coil shortens
    thermal_coeff: float  # N/degC, force gained per degree of self-heating
    thermal_mass: float   # W s/degC
    conductivity: float   # W/degC, lumped heat-loss coefficient
    length: float         # mm

    def __post_init__(self) -> None:
        for name in ("resistance", "thermal_coeff", "thermal_mass",
                     "conductivity", "length"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")
        if not math.isfinite(self.stiffness):
            raise ValueError(f"stiffness must be finite, got {self.stiffness!r}")


@dataclass(frozen=True)
class BeamCharacteristics:
    """Critical snap characteristics of the bistable beam.

    ``w_rise`` is the signed displacement of the first stable state; the
    second stable state is its mirror image at ``-w_rise``.  Each stroke
    is characterised by the signed displacement at which the branch folds
    and the force the beam resists with at that fold.
    """

    w_rise: float            # mm, stable state 1
    w_snap_thru: float       # mm, fold of the 1 -> 2 stroke
    w_snap_back: float       # mm, fold of the 2 -> 1 stroke
    f_snap_thru: float       # N
    f_snap_back: float | None = None  # N, defaults to f_snap_thru

    def __post_init__(self) -> None:
        if self.f_snap_back is None:
            object.__setattr__(self, "f_snap_back", self.f_snap_thru)
        vals = (self.w_rise, self.w_snap_thru, self.w_snap_back,
                self.f_snap_thru, self.f_snap_back)
        if not all(math.isfinite(v) for v in vals):
            raise InvalidCharacteristics(f"non-finite beam characteristic in {vals!r}")
        if self.w_rise == 0.0 or self.w_snap_thru == 0.0 or self.w_snap_back == 0.0:
            raise InvalidCharacteristics("beam displacements must be nonzero")
        if math.copysign(1.0, self.w_snap_thru) != math.copysign(1.0, self.w_rise):
            raise InvalidCharacteristics(
                "w_snap_thru must lie on the same side as w_rise "
                f"(got {self.w_snap_thru} vs {self.w_rise})")
        if abs(self.w_snap_thru) >= abs(self.w_rise):
            raise InvalidCharacteristics(
                "the snap-thru fold must lie between the stable point and center "
                f"(|{self.w_snap_thru}| >= |{self.w_rise}|)")
        if math.copysign(1.0, self.w_snap_back) == math.copysign(1.0, self.w_snap_thru):
            raise InvalidCharacteristics(
                "w_snap_back must lie on the opposite side from w_snap_thru")
        if abs(self.w_snap_back) >= abs(self.w_rise):
            raise InvalidCharacteristics(
                "the snap-back fold must lie between the mirrored stable point "
                f"and center (|{self.w_snap_back}| >= |{self.w_rise}|)")
        if self.f_snap_thru <= 0.0 or self.f_snap_back <= 0.0:
            raise InvalidCharacteristics("critical forces must be > 0")

    def stroke(self, direction: Direction) -> tuple[float, float, float]:
        """Stroke geometry in the pulling actuator's own frame.

        Returns ``(w_start, w_crit, f_crit)``.  For the back stroke the
        displacements are sign-mirrored, so both strokes share one
        convention: the pull runs from ``w_start`` toward ``w_crit``.
        """
        if direction == "thru":
            return self.w_rise, self.w_snap_thru, self.f_snap_thru
        if direction == "back":
            return self.w_rise, -self.w_snap_back, self.f_snap_back
        raise ValueError(f"direction must be 'thru' or 'back', got {direction!r}")

    @property
    def mirror_symmetric(self) -> bool:
        return (self.w_snap_back == -self.w_snap_thru
                and self.f_snap_back == self.f_snap_thru)


@dataclass(frozen=True)
class Environment:
    """Ambient conditions; environment changes enter through the actuator's
    conductivity, the ambient temperature only shifts the reference."""

    temperature: float = 22.0  # degC
    label: str = "forced-air"

    def __post_init__(self) -> None:
        if not math.isfinite(self.temperature):
            raise ValueError("ambient temperature must be finite")


@dataclass(frozen=True)
class OscillatorConfig:
    """Complete oscillator: two actuators, one beam, drive and environment."""

    actuator_1: ActuatorParams
    actuator_2: ActuatorParams
    beam: BeamCharacteristics
    env: Environment
    current: float            # A, constant supply routed to the closed switch
    snap_duration: float = 0.0  # s, transit time of one snap motion

    def __post_init__(self) -> None:
        if not (math.isfinite(self.current) and self.current >= 0.0):
            raise ValueError(f"supply current must be >= 0, got {self.current!r}")
        if not (math.isfinite(self.snap_duration) and self.snap_duration >= 0.0):
            raise ValueError(f"snap duration must be >= 0, got {self.snap_duration!r}")

    @property
    def symmetric(self) -> bool:
        return self.actuator_1 == self.actuator_2

    def actuator(self, side: int) -> ActuatorParams:
        if side == 1:
            return self.actuator_1
        if side == 2:
            return self.actuator_2
        raise ValueError(f"attach side must be 1 or 2, got {side!r}")


def snap_force_budget(beam: BeamCharacteristics, act: ActuatorParams,
                      direction: Direction = "thru") -> float:
    """Force the actuator must supply at the fold, including the tension it
    loses while shortening over the stroke: ``f_crit - k (w_crit - w_start)``."""
    w_start, w_crit, f_crit = beam.stroke(direction)
    return f_crit - act.stiffness * (w_crit - w_start)


def snap_delta_temperature(beam: BeamCharacteristics, act: ActuatorParams,
                           direction: Direction = "thru") -> float:
    """Actuator temperature rise above ambient at which the stroke snaps."""
    return snap_force_budget(beam, act, direction) / act.thermal_coeff


def equilibrium_temperature_rise(current: float, act: ActuatorParams) -> float:
    """Steady-state self-heating ``I^2 R / lambda`` above ambient."""
    if current < 0.0:
        raise ValueError(f"current must be >= 0, got {current!r}")
    return current * current * act.resistance / act.conductivity


def min_current(beam: BeamCharacteristics, act: ActuatorParams,
                direction: Direction = "thru") -> float:
    """Largest current that can never trigger the given stroke.

    At this current the equilibrium self-heating exactly equals the snap
    temperature rise, so the fold is approached but not crossed.
    """
    budget = snap_force_budget(beam, act, direction)
    return math.sqrt(act.conductivity * budget
                     / (act.thermal_coeff * act.resistance))


def oscillation_min_current(config: OscillatorConfig) -> float:
    """Minimum supply current for sustained oscillation: both strokes must
    be able to snap, so this is the larger of the two stroke bounds."""
    return max(min_current(config.beam, config.actuator_1, "thru"),
               min_current(config.beam, config.actuator_2, "back"))


def pull_time(current: float, beam: BeamCharacteristics, act: ActuatorParams,
              direction: Direction = "thru") -> float:
    """Time for the powered actuator to heat from ambient to the snap
    temperature of the given stroke.  Strictly decreasing in current.

    Raises NoOscillation when the current is at or below min_current,
    where the first-order heating never reaches the snap temperature.
    """
    heating = current * current * act.resistance
    ratio = act.conductivity * snap_force_budget(beam, act, direction) / (
        act.thermal_coeff * heating) if heating > 0.0 else math.inf
    if ratio >= 1.0:
        raise NoOscillation(
            f"current {current} A is at or below the oscillation bound "
            f"{min_current(beam, act, direction):.6g} A for the {direction} stroke")
    return -(act.thermal_mass / act.conductivity) * math.log1p(-ratio)


def oscillation_period(config: OscillatorConfig, include_snap: bool = True) -> float:
    """Closed-form oscillation period: the sum of both strokes' pull times,
    plus both snap transits when ``include_snap`` is set.

    For a mirror-symmetric beam and identical actuators this reduces to
    ``2 (T_pull + T_snap)``.  With unequal actuators or fold asymmetry
    the two half cycles are evaluated separately (extended model).
    """
    total = pull_time(config.current, config.beam, config.actuator_1, "thru")
    total += pull_time(config.current, config.beam, config.actuator_2, "back")
    if include_snap:
        total += 2.0 * config.snap_duration
    return total


def design_current(target_period: float, beam: BeamCharacteristics,
                   act: ActuatorParams) -> float:
    """Invert the closed-form period: supply current that yields the target
    period for a symmetric oscillator built from ``act``.

    Every positive finite period has a solution; the result approaches
    min_current as the target grows.  Whether the unpowered actuator has
    time to reset is a separate concern, see ``thermal.cooling_limited``.
    """
    if not (math.isfinite(target_period) and target_period > 0.0):
        raise ValueError(f"target period must be > 0, got {target_period!r}")
    budget = snap_force_budget(beam, act, "thru")
    decay = -math.expm1(-act.conductivity * target_period / (2.0 * act.thermal_mass))
    return math.sqrt(act.conductivity * budget
                     / (act.thermal_coeff * act.resistance * decay))


def scale_actuator(act: ActuatorParams, new_length: float) -> ActuatorParams:
    """Rescale to a new coil length.

    Resistance, thermal mass and conductivity are proportional to length,
    stiffness is inversely proportional, and the thermal force coefficient
    is a material constant.
    """
    if not (math.isfinite(new_length) and new_length > 0.0):
        raise ValueError(f"new length must be > 0, got {new_length!r}")
    factor = new_length / act.length
    return replace(
        act,
        resistance=act.resistance * factor,
        stiffness=act.stiffness / factor,
        thermal_mass=act.thermal_mass * factor,
        conductivity=act.conductivity * factor,
        length=new_length,
    )


# Reference design: the 69 mm coil and beam of the published prototype,
# with the thermal pair obtained from its period-vs-current fit.  The
# snap-back fold is completed symmetrically (the reference data sheet
# characterises one stroke); the measured back fold sits at +0.87 mm and
# can be set explicitly when that asymmetry matters.

def reference_actuator() -> ActuatorParams:
    return ActuatorParams(resistance=3.8, stiffness=-0.28, thermal_coeff=1.6e-2,
                          thermal_mass=2.99e-2, conductivity=2.31e-2, length=69.0)


def reference_beam() -> BeamCharacteristics:
    return BeamCharacteristics(w_rise=-2.12, w_snap_thru=-0.89,
                               w_snap_back=0.89, f_snap_thru=0.42)


def reference_config(current: float = 0.60, label: str = "forced-air",
                     snap_duration: float = 0.0) -> OscillatorConfig:
    act = reference_actuator()
    return OscillatorConfig(actuator_1=act, actuator_2=act,
                            beam=reference_beam(),
                            env=Environment(temperature=22.0, label=label),
                            current=current, snap_duration=snap_duration)
