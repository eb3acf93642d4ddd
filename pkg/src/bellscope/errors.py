"""Exception hierarchy shared across the package."""

from __future__ import annotations


class BellscopeError(Exception):
    """Base class for all package errors."""


class ScenarioError(BellscopeError):
    """Invalid scenario parameters or scenario/model mismatch."""


class UnsupportedParametrization(BellscopeError):
    """Requested parametrization does not exist for this scenario."""


class SignallingViolation(BellscopeError):
    """A distribution fails a no-signalling equality.

    Carries the offending marginal context for diagnostics.
    """

    def __init__(self, party: int, context: str):
        self.party = party
        self.context = context
        super().__init__(f"signalling from party {party + 1}: {context}")


class TooLargeError(BellscopeError):
    """Enumeration size exceeds the configured cap."""


class NoViolationError(BellscopeError):
    """Noise-resistance requested for a value at or below the bound."""


class PreconditionError(BellscopeError):
    """An operation was called on input violating its contract."""


class BudgetExhausted(BellscopeError):
    """A long-running enumeration ran out of time budget.

    The partial state is serializable and can be resumed; the CLI maps
    this to exit code 3.
    """

    def __init__(self, message: str, checkpoint: dict | None = None):
        super().__init__(message)
        self.checkpoint = checkpoint


class VerificationError(BellscopeError):
    """A stored or recomputed artifact failed re-verification (exit code 2)."""
