"""Exception types shared across the package.

Validation failures carry machine-readable field errors so the HTTP service and
the CLI can render identical error payloads.
"""
from __future__ import annotations

from dataclasses import dataclass, field


class MrtPowerError(Exception):
    """Base class for all package errors."""


class DomainError(MrtPowerError, ValueError):
    """An argument lies outside a function's mathematical domain."""


class ConvergenceError(MrtPowerError, RuntimeError):
    """An iteration failed to converge; carries the achieved residual."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class SeriesCapError(MrtPowerError, RuntimeError):
    """A truncated series hit its term cap; carries bounds on the true value."""

    def __init__(self, message: str, lower: float, upper: float):
        super().__init__(message)
        self.lower = lower
        self.upper = upper


@dataclass(frozen=True)
class FieldError:
    """One machine-readable validation failure tied to an input field."""

    code: str
    field: str
    message: str
    detail: dict = field(default_factory=dict)

    def to_payload(self) -> dict:
        out = {"code": self.code, "field": self.field, "message": self.message}
        if self.detail:
            out["detail"] = self.detail
        return out


class ValidationError(MrtPowerError, ValueError):
    """Invalid user input; aggregates one or more field errors."""

    def __init__(self, errors: list[FieldError] | FieldError):
        if isinstance(errors, FieldError):
            errors = [errors]
        self.errors = errors
        super().__init__("; ".join(e.message for e in errors))

    @property
    def code(self) -> str:
        return self.errors[0].code

    def to_payload(self) -> dict:
        return {
            "error": {
                "code": self.code,
                "message": str(self),
                "fields": [e.to_payload() for e in self.errors],
            }
        }


class SampleSizeCapError(MrtPowerError):
    """No feasible sample size below the solver cap achieves the target power."""

    def __init__(self, message: str, cap: int, power_at_cap: float):
        super().__init__(message)
        self.cap = cap
        self.power_at_cap = power_at_cap

    def to_payload(self) -> dict:
        return {
            "error": {
                "code": "cap_exceeded",
                "message": str(self),
                "cap": self.cap,
                "power_at_cap": self.power_at_cap,
            }
        }
