"""Exception types raised across trotterlab."""

from __future__ import annotations


class TrotterLabError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(TrotterLabError, ValueError):
    pass


class DimensionError(InvalidInputError):
    pass


class DomainError(InvalidInputError):
    pass


class UnsupportedInputError(InvalidInputError):
    pass


class SingularityError(TrotterLabError, ArithmeticError):
    def __init__(self, message: str, condition: float):
        super().__init__(f"{message} (condition estimate {condition:.3e})")
        self.condition = condition


class AccuracyError(TrotterLabError, ArithmeticError):
    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved tolerance {achieved:.3e})")
        self.achieved = achieved


class PreconditionError(TrotterLabError, ValueError):
    pass


class DegenerateFitError(TrotterLabError, ValueError):
    pass


class AlignmentError(InvalidInputError):
    pass


class ResolutionError(InvalidInputError):
    pass


class ConstructionError(TrotterLabError, RuntimeError):
    def __init__(self, message: str, level: int):
        super().__init__(f"{message} (level {level})")
        self.level = level


class ConfigError(TrotterLabError, ValueError):
    """Invalid experiment configuration; ``key`` names the offending entry."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message if key is None else f"{message}: {key!r}")
        self.key = key
