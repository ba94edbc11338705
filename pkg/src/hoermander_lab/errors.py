"""Exception and warning types shared across the package."""


class HoermanderError(Exception):
    """Base class for package errors."""


class DomainError(HoermanderError, ValueError):
    """Argument outside the domain of a function (e.g. r < 1 for a class-M function)."""


class RangeError(HoermanderError, ValueError):
    """Tabulated data queried outside its range without an extrapolation rule."""


class PreconditionError(HoermanderError, ValueError):
    """An operation's precondition does not hold for the given inputs."""


class ResolutionError(HoermanderError):
    """A sampled object is too coarse for the requested derivative or profile."""


class ConsistencyError(HoermanderError):
    """A derived constant failed its own re-check on the sample set."""


class IndeterminateError(HoermanderError):
    """A numerical classification could not be decided."""


class AliasingWarning(UserWarning):
    """Energy in the outermost frequency shell exceeds the configured fraction."""


class CompatibilityWarning(UserWarning):
    """Right-hand side violates a compatibility condition."""


class ParabolicityError(PreconditionError):
    """The leading time coefficient of a parabolic operator vanishes on the grid."""
