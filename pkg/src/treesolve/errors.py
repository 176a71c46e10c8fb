"""Exception hierarchy shared across the package.

The CLI and the HTTP service map these onto exit codes and status codes;
everything else raises and lets the caller classify.
"""
from __future__ import annotations


class TreesolveError(Exception):
    """Base class for all package errors."""


class ScenarioError(TreesolveError):
    """Invalid scenario document or request payload.

    `field` points at the offending location ("actions[2].outcomes[0].probability")
    when known.
    """

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class OutOfDomainError(ScenarioError):
    """A state vector left the attainable domain of some dimension."""

    def __init__(self, message: str, dimension: int, action_id: str | None = None):
        super().__init__(message, field=f"state[{dimension}]")
        self.dimension = dimension
        self.action_id = action_id


class CapacityError(TreesolveError):
    """Graph construction exceeded the configured node cap."""

    def __init__(self, node_cap: int):
        super().__init__(f"state graph exceeded the node cap of {node_cap}")
        self.node_cap = node_cap


class SolveTimeoutError(TreesolveError):
    """A stage ran past its deadline."""

    def __init__(self, seconds: float):
        super().__init__(f"solve exceeded the time limit of {seconds:g} s")
        self.seconds = seconds


class InternalCheckError(TreesolveError):
    """An internal invariant failed; indicates a bug, not bad input."""
