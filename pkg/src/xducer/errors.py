"""Exception types shared across the package."""

from __future__ import annotations

from dataclasses import dataclass


class XducerError(Exception):
    """Base class for all package errors."""


class ConfigError(XducerError):
    """Malformed or unreadable configuration document."""


class MissingFieldError(ConfigError):
    def __init__(self, field: str):
        super().__init__(f"missing required field '{field}'")
        self.field = field


class UnknownFieldError(ConfigError):
    def __init__(self, field: str):
        super().__init__(f"unknown field '{field}'")
        self.field = field


class UnknownUnitError(ConfigError):
    def __init__(self, field: str, unit: str):
        super().__init__(f"unknown unit '{unit}' for field '{field}'")
        self.field = field
        self.unit = unit


@dataclass(frozen=True)
class Violation:
    """A single named invariant violation found during validation."""

    name: str
    field: str
    message: str

    def __str__(self) -> str:
        return f"{self.name} [{self.field}]: {self.message}"


class ValidationError(XducerError):
    """Raised with the complete list of invariant violations, not just the first."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"{len(self.violations)} validation error(s): {lines}")


class NumericFailure(XducerError):
    """A numerical operation produced no usable result (overflow, singularity, no root)."""


class ConvergenceError(NumericFailure):
    """An iterative scheme did not reach the requested tolerance within budget."""
