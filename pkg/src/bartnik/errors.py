"""Typed failures of the construction.

Every failure carries the pipeline stage it was raised in and a dictionary of
the offending values, so that reports can be emitted on failure.
"""

from typing import Any, Dict, Optional


class BartnikError(Exception):
    """Base class for all construction and verification failures.

    Attributes:
        stage: Pipeline stage tag (e.g. "collar", "glue")
        details: Offending values, JSON serializable
    """

    exit_code = 3

    def __init__(
        self,
        message: str,
        stage: str = "",
        details: Optional[Dict[str, Any]] = None,
    ):
        super().__init__(message)
        self.stage = stage
        self.details = details or {}


class ConfigError(BartnikError):
    exit_code = 1


class GridMismatchError(BartnikError):
    exit_code = 1


class PoleRegularityError(BartnikError):
    """Metric samples do not close smoothly at the poles."""


class EigenSolveError(BartnikError):
    pass


class SimplicityViolationError(BartnikError):
    """Computed first eigenfunction changes sign; the grid is too coarse."""


class UniformizationError(BartnikError):
    pass


class ParameterError(BartnikError):
    pass


class PathCoherenceError(BartnikError):
    pass


class ExtremalityError(BartnikError):
    """Reissner–Nordström parameters with m <= |Q|."""


class DimensionError(BartnikError):
    pass


class UngluableError(BartnikError):
    pass


class ZetaConstructionError(BartnikError):
    pass


class GlueHypothesisError(BartnikError):
    """One of the four bridge hypotheses fails.

    Attributes:
        condition: Number of the violated hypothesis (1 to 4)
    """

    def __init__(self, message: str, condition: int, **kwargs: Any):
        super().__init__(message, **kwargs)
        self.condition = condition
        self.details.setdefault("condition", condition)


class MollificationError(BartnikError):
    pass


class BendPreconditionError(BartnikError):
    pass


class BendSearchError(BartnikError):
    pass


class MassTooSmallError(BartnikError):
    exit_code = 2


class AdmissibilityError(BartnikError):
    exit_code = 2


class EpsilonSearchError(BartnikError):
    pass


class CollarDECError(BartnikError):
    """Collar margin is non-positive somewhere.

    Attributes:
        location: (t, θ) of the worst node
    """

    def __init__(self, message: str, location: tuple, **kwargs: Any):
        super().__init__(message, **kwargs)
        self.location = location
        self.details.setdefault("location", list(location))


class NeckError(BartnikError):
    pass
