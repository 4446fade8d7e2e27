"""Shared exception types.

The command line maps these onto exit codes, and the HTTP layer maps them
onto status codes, so everything user-facing should raise one of these
rather than a bare ValueError.
"""
from __future__ import annotations


class TreeFreezeError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(TreeFreezeError):
    """Raised for malformed tree text; carries the offending position."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class LogFormatError(TreeFreezeError):
    """Raised for malformed event-log input (CSV/XES/JSON lines)."""


class ExplosionError(TreeFreezeError):
    """Raised when a bounded enumeration exceeds its configured size cap."""


class SearchBudgetExceeded(TreeFreezeError):
    """Raised when an alignment search exceeds its node-expansion budget."""


class ContractViolation(TreeFreezeError):
    """Raised when a pre- or postcondition of a discovery step fails.

    ``stage`` names the step that was violated (e.g. ``"ipda-postcondition"``)
    so callers can report it mechanically.
    """

    def __init__(self, stage: str, message: str):
        self.stage = stage
        super().__init__(f"{stage}: {message}")


class FreezeSelectionError(TreeFreezeError):
    """Raised for invalid frozen-subtree selections (nested, stale paths...)."""
