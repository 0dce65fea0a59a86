"""Exception types shared across the package."""

from __future__ import annotations

from typing import Any


class ValidationError(ValueError):
    """An input value violates a domain invariant.

    ``field`` names the offending attribute when the raising object knows it
    (``None`` for anonymous vectors), ``constraint`` is the violated rule in
    words and ``observed`` the value that broke it.
    """

    def __init__(self, field: str | None, constraint: str, observed: Any = None):
        self.field = field
        self.constraint = constraint
        self.observed = observed
        super().__init__(self._render())

    def _render(self) -> str:
        head = f"{self.field} {self.constraint}" if self.field else self.constraint
        if self.observed is not None:
            head += f" (observed {self.observed})"
        return head


class DimensionMismatch(ValidationError):
    """Two vectors that must share the number of states do not."""


class PreconditionError(ValueError):
    """An operation was called outside its domain."""


class InvariantViolation(RuntimeError):
    """A computed result failed one of its own postcondition checks."""
