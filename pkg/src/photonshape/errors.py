"""Exception types shared across the toolkit."""
from __future__ import annotations


class ConfigError(ValueError):
    """Invalid run configuration; ``path`` names the offending key."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class NumericsError(RuntimeError):
    """A forward integration produced non-finite values or an invalid state."""


class InversionError(RuntimeError):
    """The pulse reconstruction is singular or physically unreachable."""


class StageError(RuntimeError):
    """Wraps a failure inside a named pipeline stage."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}': {cause}")
