"""Exception hierarchy shared by all densreg modules.

Two mixin bases split the named errors into user-input problems
(:class:`ValidationError`) and data-dependent numerical failures
(:class:`NumericalError`); the CLI maps them to distinct exit codes.
"""


class DensRegError(Exception):
    """Base class for all library-specific errors."""


class ValidationError(DensRegError):
    """Invalid arguments, configuration, or incompatible inputs."""


class NumericalError(DensRegError):
    """Computation failed because of degenerate or pathological data."""


class InsufficientData(ValidationError):
    """Too few samples or functions to perform the requested operation."""


class DegenerateSample(NumericalError):
    """Sample set has zero spread where positive spread is required."""


class OutOfSupport(ValidationError):
    """A sample lies outside the declared support interval."""


class EmptyDensity(NumericalError):
    """Density values integrate to zero and cannot be normalized."""


class AlphaOutOfRange(ValidationError):
    """Uniform mixture weight outside the permitted range."""


class TransformOverflow(NumericalError):
    """exp(psi) would overflow; upstream density was not preconditioned."""


class GridMismatch(ValidationError):
    """Operands live on different grids."""


class TruncationExceedsRank(ValidationError):
    """Requested truncation order exceeds the retained eigenbasis size."""


class DegenerateKernelWidth(NumericalError):
    """Kernel width heuristic returned zero (all predictors identical)."""


class InvalidSmoothing(ValidationError):
    """Ridge smoothing parameter must be strictly positive."""


class EmptyNeighbourhood(NumericalError):
    """All kernel weights vanished; no training point is within reach."""


class NoViableCandidate(NumericalError):
    """Every hyperparameter candidate produced infinite risk."""


class EmptySet(ValidationError):
    """An aggregate was requested over an empty collection."""


class DivisionByZeroBaseline(NumericalError):
    """Relative error is undefined because the baseline error is zero."""


class InvalidScenario(ValidationError):
    """Synthetic-data scenario parameters are inconsistent."""


class TrainingSetTooLarge(ValidationError):
    """Training set exceeds the configured size cap for a global fit."""
