"""Exception hierarchy shared by all modules.

Each class carries the CLI exit code it maps to.
"""


class SizeLocError(Exception):
    exit_code = 3


class ValidationError(SizeLocError, ValueError):
    """Invalid body, direction, dataset or parameter."""


class UnsupportedCombinationError(SizeLocError, ValueError):
    """Minkowski sum whose result is not representable in the body algebra."""


class UnsupportedDimensionError(SizeLocError, ValueError):
    pass


class StructuralError(SizeLocError, ValueError):
    """Mismatched direction sets, missing antipodes, shape mismatches."""


class InsufficientDataError(SizeLocError, ValueError):
    pass


class DataError(SizeLocError, ValueError):
    """NaN or infinite values in inputs."""


class GenerationError(SizeLocError, RuntimeError):
    pass


class DegeneracyError(SizeLocError, ArithmeticError):
    """Numerical degeneracy, e.g. a correlation far outside [-1, 1]."""

    exit_code = 4


class ConfigError(SizeLocError, ValueError):
    exit_code = 2
