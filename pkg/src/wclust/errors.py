"""Exception types raised across the package."""


class WclustError(Exception):
    """Base class for all errors raised by wclust."""


class InvalidMatrix(WclustError):
    """Matrix input violates a structural requirement (e.g. not symmetric)."""


class NotPsd(WclustError):
    """Symmetric matrix has an eigenvalue below the negative tolerance."""


class DimensionError(WclustError):
    """Inputs have incompatible dimensions."""


class ConvergenceError(WclustError):
    """Iterative solver failed to reach its residual tolerance.

    Carries the last residual in ``residual``.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class InvalidCost(WclustError):
    """Cost matrix contains NaN or non-finite entries."""


class SizeError(WclustError):
    """Sample sizes are incompatible."""


class InvalidTrim(WclustError):
    """Trimming constant outside [0, 0.5)."""


class InsufficientData(WclustError):
    """Too few (or degenerate) observations for the requested operation."""


class InvalidParam(WclustError):
    """Parameter value outside its valid range."""


class SubsampleError(WclustError):
    """Requested subsample size exceeds the number of observations."""


class ReferenceMismatch(WclustError):
    """Operands were built against different reference measures."""
