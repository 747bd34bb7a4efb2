"""Exception types shared across the package.

``DomainError`` covers bad input (invalid groups, malformed parameters,
contradictory assertions).  The CLI maps it to exit code 2.  Anything else
that escapes is treated as an internal failure.
"""
from __future__ import annotations


class DomainError(ValueError):
    """Invalid input or a violated precondition."""


class OrderCapError(DomainError):
    """A group would exceed the configured order cap."""

    def __init__(self, order: int, cap: int, what: str = "group"):
        self.order = order
        self.cap = cap
        super().__init__(
            f"{what} of order {order} exceeds the order cap {cap} "
            f"(raise it with --cap or HYBRIDRING_ORDER_CAP)"
        )


class ComputationError(RuntimeError):
    """An algorithm failed where mathematics says it should not."""
