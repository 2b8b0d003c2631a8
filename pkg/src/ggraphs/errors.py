"""Exception hierarchy shared by every module in the package."""

from __future__ import annotations


class GGraphError(Exception):
    """Base class for all package errors."""


class ParseError(GGraphError):
    """Malformed group spec, element spec, or serialized object."""


class NotAGroup(GGraphError):
    """A multiplication table failed the group axioms."""


class PreconditionFailed(GGraphError):
    """An operation was called on data outside its stated domain."""


class CapExceeded(GGraphError):
    """A size cap (closure size, isomorphism problem size) was exceeded."""


class BudgetExceeded(GGraphError):
    """A search ran out of node budget before reaching a decision.

    Carries the partial results found so far, when any; a budget stop is
    always reported as inconclusive, never as a negative decision.
    """

    def __init__(self, message: str, partial=None, nodes: int = 0):
        super().__init__(message)
        self.partial = partial
        self.nodes = nodes


class WitnessInvalid(GGraphError):
    """A supplied witness is malformed or fails its defining conditions."""


class InternalAssertion(GGraphError):
    """A guaranteed-by-theorem property failed; indicates a bug."""
