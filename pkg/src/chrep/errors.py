"""Exception hierarchy for the workbench.

Every failure mode that the operation contracts name gets its own class so
callers (and the CLI exit-code mapping) can branch on type rather than on
message text.  ``witness`` carries the offending data when there is one.
"""

from __future__ import annotations


class ChrepError(Exception):
    """Base class for all workbench errors."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class SizeLimitExceeded(ChrepError):
    """A constructed object would exceed the configured order bound."""


# -- ring / linear algebra ------------------------------------------------

class NotAssociative(ChrepError):
    pass


class NotCommutative(ChrepError):
    pass


class BadUnit(ChrepError):
    pass


class OrderMismatch(ChrepError):
    """Additive orders are not respected by a tensor, matrix, or map."""


class NotLocal(ChrepError):
    pass


# -- groups / modules ------------------------------------------------------

class BadGroupLaw(ChrepError):
    pass


class NotStable(ChrepError):
    """A claimed submodule is not stable under the ring or group action."""


class RingMismatchError(ChrepError):
    pass


# -- conditions -------------------------------------------------------------

class PluginFailure(ChrepError):
    pass


class ConstituentNotInC(ChrepError):
    pass


class NotASubmodule(ChrepError):
    """The set of classes passing a condition failed to form a submodule."""


# -- pseudorepresentations / Cayley-Hamilton --------------------------------

class UnsupportedCarrier(ChrepError):
    pass


class KernelNotIdeal(ChrepError):
    """Internal consistency failure: a pseudorepresentation kernel is not
    a two-sided ideal, signalling a broken backend."""


class NotReducible(ChrepError):
    pass


class InducedDNotWellDefined(ChrepError):
    pass


class KernelNotTwoSided(ChrepError):
    pass


class NotFaithful(ChrepError):
    pass


class TheoremViolation(ChrepError):
    """A verification hook found a counterexample to an expected identity."""


class AssoComViolation(ChrepError):
    pass


class ResidualMismatch(ChrepError):
    pass


class PeirceMismatch(ChrepError):
    pass


class BridgeNotBijective(ChrepError):
    """Reported (not raised) when an extension-group bridge fails to be a
    bijection; carried in reports as a finding with witness data."""


# -- workbench ---------------------------------------------------------------

class SessionParseError(ChrepError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        super().__init__(message)
        self.line = line
        self.column = column


class SessionReferenceError(ChrepError):
    pass


class OperationError(ChrepError):
    """An operation failed while executing a session command."""

    def __init__(self, message: str, command_index: int | None = None, witness=None):
        super().__init__(message, witness)
        self.command_index = command_index
