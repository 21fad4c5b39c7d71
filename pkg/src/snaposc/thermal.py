"""First-order actuator heat balance and the linear force law.

The lumped model is ``C_th dT/dt = I^2 R - lambda (T - T_env)``, which has
an exact exponential solution for constant current, so time stepping is
exact at any step size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import (ActuatorParams, BeamCharacteristics, Environment,
                   snap_delta_temperature)
from .errors import InvalidTolerance


@dataclass(frozen=True)
class ActuatorThermalState:
    temperature: float  # degC
    powered: bool

    def __post_init__(self) -> None:
        if not math.isfinite(self.temperature):
            raise ValueError("temperature must be finite")


def actuator_force(temperature: float, w: float, act: ActuatorParams,
                   env: Environment, attach_side: int,
                   beam: BeamCharacteristics) -> float:
    """Linear thermomechanical pull available at the beam attachment.

    ``c_T (T - T_env) + k (w_side - w_rise)`` where ``w_side`` is the beam
    displacement seen from the actuator's own frame: side 1 reads ``w``
    directly, side 2 is attached mirrored and reads ``-w``.  Each side is
    mounted taut at its own stable state, so the value is zero at ambient
    there.  The raw law can go negative far from the actuator's side; a
    negative value means the coil is slack (it cannot push), which the
    equilibrium solver clamps to zero.
    """
    if attach_side == 1:
        w_side = w
    elif attach_side == 2:
        w_side = -w
    else:
        raise ValueError(f"attach side must be 1 or 2, got {attach_side!r}")
    return (act.thermal_coeff * (temperature - env.temperature)
            + act.stiffness * (w_side - beam.w_rise))


def temperature_step(temperature: float, current: float, dt: float,
                     act: ActuatorParams, env: Environment) -> float:
    """Advance the actuator temperature by ``dt`` under constant current.

    Exact closed form, independent of step subdivision:
    ``T_env + I^2 R / lambda + (T - T_env - I^2 R / lambda) exp(-lambda dt / C_th)``.
    """
    if dt < 0.0:
        raise ValueError(f"dt must be >= 0, got {dt!r}")
    t_eq = env.temperature + current * current * act.resistance / act.conductivity
    return t_eq + (temperature - t_eq) * math.exp(-act.conductivity * dt
                                                  / act.thermal_mass)


def cooling_time(dt_from: float, epsilon: float, act: ActuatorParams) -> float:
    """Time for an unpowered actuator to decay from ``dt_from`` above ambient
    to within ``epsilon`` of ambient; zero when already there.

    This is a reset heuristic used for warnings only: sustained operation
    does not require a full reset, as the simulator shows.
    """
    if epsilon <= 0.0 or not math.isfinite(epsilon):
        raise InvalidTolerance(f"epsilon must be > 0, got {epsilon!r}")
    if dt_from <= epsilon:
        return 0.0
    return (act.thermal_mass / act.conductivity) * math.log(dt_from / epsilon)


def cooling_limited(target_period: float, beam: BeamCharacteristics,
                    act: ActuatorParams, epsilon: float = 2.0) -> bool:
    """True when half the target period is shorter than the reset heuristic,
    i.e. the unpowered side would start its stroke noticeably warm."""
    reset = cooling_time(snap_delta_temperature(beam, act, "thru"), epsilon, act)
    return 0.5 * target_period < reset
