"""Failure taxonomy shared by the oracle, router and harness.

Two classes of runtime failure are kept strictly apart: requests that
violate their stated preconditions (the caller broke the rules, state is
untouched) and steps that a healthy expander guarantees to succeed but
did not (the input graph broke its promise, state is rolled back).
"""


class RoutingError(Exception):
    """Base class for all errors raised by this package."""


class CallerError(RoutingError):
    """A request violated its preconditions; no state was modified."""


class ExpansionViolation(RoutingError):
    """A step that expansion guarantees failed; state was rolled back."""


class FormatError(RoutingError):
    """Malformed graph, trace or profile text."""


class GenerationError(RoutingError):
    """A random generator exhausted its retry budget."""
