"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Bad arguments: wrong dimensions, out-of-range indices, zero vectors."""


class ConvergenceError(RuntimeError):
    """An iterative solver stopped before reaching its tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class InvalidStateError(ValueError):
    """A density matrix or probability violates positivity/normalization."""


class InconsistentCorrelatorsError(InvalidStateError):
    """A correlator table does not reconstruct a positive density matrix."""


class UnsupportedMeasurementError(ValueError):
    """The operation needs rank-1 measurement elements."""


class NoFactorizationError(ValueError):
    """The couplings admit no real factorizing field."""


class FitUnderdeterminedError(ValueError):
    """Fit data cannot pin down the model parameters."""
