"""Exception hierarchy shared by every module of the package."""


class DualSeriesError(Exception):
    """Base class for all library errors."""


class ConfigError(DualSeriesError):
    """Invalid user-supplied configuration (bad parameters, wrong model kind)."""


class NumericError(DualSeriesError):
    """A computation could not be carried out to the requested accuracy."""


class InvalidParam(ConfigError, ValueError):
    pass


class WrongModelKind(ConfigError, TypeError):
    pass


class OrderOutOfRange(ConfigError, IndexError):
    pass


class ZeroDetuning(ConfigError, ValueError):
    pass


class NotAtResonance(ConfigError, ValueError):
    pass


class NonDecomposable(NumericError, ValueError):
    pass


class GridTooCoarse(NumericError):
    pass


class DegenerateSpectrum(NumericError):
    pass


class BranchSwapDetected(NumericError):
    pass


class QuadratureUnderResolved(NumericError):
    pass


class StepTooLarge(NumericError):
    pass


class WindowTooShort(NumericError):
    pass
