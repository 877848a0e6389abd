"""Exception types raised across the package."""


class LabError(Exception):
    """Base class for all errors raised by this package."""


class DimensionTooSmall(LabError, ValueError):
    pass


class EmptyLattice(LabError, ValueError):
    pass


class ResolutionTooLow(LabError, ValueError):
    pass


class DimensionMismatch(LabError, ValueError):
    pass


class DisjointnessViolated(LabError, ValueError):
    pass


class NodeBudgetExceeded(LabError, RuntimeError):
    pass


class OutOfApproximationRange(LabError, ValueError):
    pass


class PreconditionError(LabError, ValueError):
    pass


class NoBranch(LabError, ValueError):
    pass


class WindowViolated(LabError, ValueError):
    pass


class TimeOutOfRange(LabError, ValueError):
    pass


class DegenerateFit(LabError, ValueError):
    pass


class ConfigError(LabError, ValueError):
    pass
