"""Exception hierarchy shared by all modules."""


class BatteryError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameter(BatteryError, ValueError):
    pass


class UnphysicalState(BatteryError):
    """Covariance matrix violates the uncertainty relation."""


class NotSymplectic(BatteryError):
    pass


class UnstableDynamics(BatteryError):
    """Drift matrix has an eigenvalue with non-negative real part."""


class SingularSystem(BatteryError):
    """Linear system for the steady state is singular although A is stable."""


class UndefinedEfficiency(BatteryError, ZeroDivisionError):
    pass


class SingularTrajectory(BatteryError):
    """Speed denominator vanishes over an extended stretch (pure states)."""


class ConvergenceError(BatteryError):
    """Trajectory does not reach the steady state within the horizon."""


class ConfigError(BatteryError):
    pass
