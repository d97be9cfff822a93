"""Exception types shared across the engine."""

from __future__ import annotations


class ValidationError(ValueError):
    """Invalid input value. ``field`` names the offending parameter when known."""

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        if field is not None and not message.startswith(field):
            message = f"{field}: {message}"
        super().__init__(message)


class DegenerateInputError(ValidationError):
    """Input is well-formed but numerically unusable (zero volatility, constant series)."""
