"""Exception hierarchy.

Validation problems map to CLI exit code 2, metric incompatibilities to 3.
"""

from __future__ import annotations


class ScEvalError(Exception):
    exit_code = 2


class ValidationError(ScEvalError, ValueError):
    """Input data violates a structural requirement."""


class EmptyInput(ValidationError):
    pass


class NonFiniteValue(ValidationError):
    pass


class NegativeError(ValidationError):
    pass


class TargetOutOfRange(ValidationError):
    pass


class RankOutOfRange(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class ParseError(ValidationError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class AlignmentError(ValidationError):
    pass


class DuplicateSample(ValidationError):
    pass


class IdMismatch(ValidationError):
    pass


class MetricIncompatible(ScEvalError, ValueError):
    """The requested metric is undefined for the given data."""

    exit_code = 3


class NotBinary(MetricIncompatible):
    pass


class SingleClass(MetricIncompatible):
    pass


class DegenerateRange(MetricIncompatible):
    pass
