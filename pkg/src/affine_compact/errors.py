"""Exceptions raised across affine_compact.

Every error carries a ``details`` mapping so the CLI can dump it as JSON.
"""
from typing import Any


class AffineError(Exception):
    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> dict:
        out = {"error": type(self).__name__, "message": self.message}
        for k, v in self.details.items():
            out[k] = _jsonable(v)
        return out


def _jsonable(value):
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (int, float, str, bool)) or value is None:
        return value
    return str(value)


class ParameterError(AffineError, ValueError):
    pass


class SchemaError(AffineError, ValueError):
    pass


class ParseError(AffineError, ValueError):
    pass


class ModelValidationError(AffineError):
    """Raised by validate_model. ``report`` holds every issue found, not just the first."""

    def __init__(self, message: str, report=None, **details: Any):
        super().__init__(message, **details)
        self.report = report

    def to_dict(self) -> dict:
        out = super().to_dict()
        if self.report is not None:
            out["report"] = self.report.to_dict()
        return out


class NegativeIntensity(ModelValidationError):
    pass


class SupportViolation(ModelValidationError):
    pass


class DegenerateSpan(ModelValidationError):
    pass


class MalformedRateMatrix(AffineError, ValueError):
    pass


class NoCounter(AffineError):
    pass


class TrichotomyViolation(AffineError):
    pass


class Inconsistent(AffineError):
    pass


class NotAffine1D(AffineError):
    pass


class UnclassifiableModel(AffineError):
    pass


class NotCounterCoordinates(AffineError):
    pass


class NonPolynomialSystem(AffineError):
    pass


class ToleranceNotMet(AffineError):
    pass
