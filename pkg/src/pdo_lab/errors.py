"""Exception types raised across the package."""


class PDOLabError(Exception):
    """Base class for all errors raised by pdo_lab."""


class DimensionError(PDOLabError, ValueError):
    pass


class SiteIndexError(PDOLabError, IndexError):
    pass


class ContractViolation(PDOLabError, ValueError):
    """An input breaks a documented precondition (e.g. non-Hermitian matrix)."""


class InvalidStateError(PDOLabError, ValueError):
    pass


class InvalidParameterError(PDOLabError, ValueError):
    pass


class NormalizationError(PDOLabError, ValueError):
    pass


class DegenerateProjectionError(PDOLabError, ArithmeticError):
    pass


class InvalidResourceError(PDOLabError, ValueError):
    pass


class ConfigurationError(PDOLabError, ValueError):
    pass


class OptimizationError(PDOLabError, RuntimeError):
    pass


class ScaleLimitError(PDOLabError, ValueError):
    pass
