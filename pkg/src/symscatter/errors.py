"""Custom error classes for symscatter."""


class SymScatterError(Exception):
    """Base class for all custom exceptions in symscatter."""

    def __init__(self, message):
        super().__init__(message)
        self.message = message


class NotPositiveDefiniteError(SymScatterError):
    """Error to be raised when a matrix that must be positive definite is not."""


class DimensionMismatchError(SymScatterError):
    """Error to be raised when matrices or vectors have incompatible shapes."""


class SchemeError(SymScatterError):
    """Error to be raised when a pair scheme cannot be used for the given sample size."""


class ScatterError(SymScatterError):
    """Base class for failures of the scatter solvers."""


class NotConvergedError(ScatterError):
    """Error to be raised when a solver hits max_iter before reaching the tolerance.

    The last iterate is kept in ``report`` so callers can inspect it.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class DegenerateSampleError(ScatterError):
    """Error to be raised when the fixed-point map loses rank."""


class ZeroVectorError(ScatterError):
    """Error to be raised when Tyler's functional meets a zero vector."""


class DecompositionError(SymScatterError):
    """Error to be raised when a U-statistic decomposition cannot be computed."""


class ConfigError(SymScatterError):
    """Error to be raised when an experiment configuration is invalid."""


class ExperimentError(SymScatterError):
    """Error to be raised when one or more replications of an experiment fail."""
