"""Exception types shared across the package."""


class SnapOscError(Exception):
    """Base class for all domain errors raised by this package."""


class NoOscillation(SnapOscError):
    """Supply current is at or below the minimum needed to trigger a snap."""


class Infeasible(SnapOscError):
    """No parameter value can reproduce the requested operating point."""


class InvalidTolerance(SnapOscError, ValueError):
    """A tolerance argument is zero or negative."""


class InvalidCharacteristics(SnapOscError, ValueError):
    """Beam snap characteristics violate the geometric sign/ordering rules."""


class OutOfBranch(SnapOscError):
    """Displacement lies outside the requested equilibrium branch domain."""


class NoConvergence(SnapOscError):
    """The equilibrium root finder hit its iteration cap (malformed curve)."""


class InsufficientCycles(SnapOscError):
    """Trace does not contain enough snap events to measure a period."""


class DegenerateDataset(SnapOscError):
    """Dataset cannot constrain the fit (too few points or all infeasible)."""


class ConfigError(SnapOscError, ValueError):
    """Configuration file failed validation; message carries the field path."""
