"""Desk-scale numerics for parabolic problems in generalized anisotropic Sobolev spaces."""
from .errors import (AliasingWarning, CompatibilityWarning, ConsistencyError, DomainError,
                     HoermanderError, IndeterminateError, ParabolicityError, PreconditionError,
                     RangeError, ResolutionError)
from .karamata import KaramataFunction, constant, integral_condition, multilog
from .symbols import RegularityIndex
from .spaces import (Box, FrequencyGrid, FullSpace, HalfLinePlus, SampledField, norm_full,
                     norm_plus, norm_restriction)
from .heat_solver import HeatProblemSpec, solve_heat

__version__ = "0.1.0"

__all__ = [
    "AliasingWarning", "Box", "CompatibilityWarning", "ConsistencyError", "DomainError",
    "FrequencyGrid", "FullSpace", "HalfLinePlus", "HeatProblemSpec", "HoermanderError",
    "IndeterminateError", "KaramataFunction", "ParabolicityError", "PreconditionError",
    "RangeError", "RegularityIndex", "ResolutionError", "SampledField", "constant",
    "integral_condition", "multilog", "norm_full", "norm_plus", "norm_restriction",
    "solve_heat",
]
