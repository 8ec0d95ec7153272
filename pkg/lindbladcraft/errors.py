class LindbladCraftError(Exception): ...


class DimensionMismatchError(LindbladCraftError, ValueError): ...


class NonFiniteError(LindbladCraftError, ArithmeticError): ...


class ConvergenceError(LindbladCraftError, RuntimeError): ...


class ModelValidationError(LindbladCraftError, ValueError): ...


class NormalizationError(LindbladCraftError, ValueError): ...


class SchemeStructureError(LindbladCraftError, ValueError): ...


class SingularMetricError(LindbladCraftError, ArithmeticError): ...


class GridMismatchError(LindbladCraftError, ValueError): ...


class ConfigError(LindbladCraftError, ValueError): ...


class RunFailureError(LindbladCraftError, RuntimeError):
    def __init__(self, message: str, aborted_fraction: float = 0.0):
        super().__init__(message)
        self.aborted_fraction = aborted_fraction
