"""Exception hierarchy shared by all belltensor modules."""

from __future__ import annotations


class BellTensorError(Exception):
    """Base class for all belltensor errors."""


class ValidationError(BellTensorError, ValueError):
    """Input violates a documented precondition (shape, hermiticity, range)."""


class SingularMatrixError(BellTensorError):
    """Matrix is singular or too close to singular to invert reliably."""

    def __init__(self, message: str, det_estimate: float | None = None):
        super().__init__(message)
        self.det_estimate = det_estimate


class DegenerateGameError(ValidationError):
    """Game has zero classical bias and cannot be normalized."""


class SizeError(BellTensorError, ValueError):
    """Problem size exceeds what exhaustive or SDP methods can handle."""


class SolverError(BellTensorError):
    """SDP solver failed to return a usable solution."""

    def __init__(self, message: str, residuals: dict | None = None):
        super().__init__(message)
        self.residuals = residuals or {}


class CertificateError(ValidationError):
    """A joint-POVM certificate failed verification."""

    def __init__(self, message: str, residuals: dict | None = None):
        super().__init__(message)
        self.residuals = residuals or {}
