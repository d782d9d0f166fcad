"""Exception hierarchy shared by every nipreg module."""

from __future__ import annotations
from typing import Any, Dict, Optional


class NipregError(Exception):
    """Base class for all errors raised by nipreg."""


class SpecError(NipregError, ValueError):
    """A group, subset, grid or rational spec could not be parsed."""


class GroupAxiomError(SpecError):
    """A multiplication table fails the group axioms."""


class CapExceededError(NipregError):
    """An order or enumeration cap was exceeded."""


class GroupMismatchError(NipregError, ValueError):
    """Set algebra was attempted across two different groups."""


class PreconditionError(NipregError, ValueError):
    """A verified precondition does not hold; `witness` names an offending element."""

    def __init__(self, message: str, witness: Optional[int] = None):
        super().__init__(message if witness is None else f"{message} (witness: {witness})")
        self.witness = witness


class NumericalAmbiguityError(NipregError):
    """A guarded floating-point comparison landed inside its margin."""


class DegenerateDimensionError(NipregError, ValueError):
    """A VC dimension of 0 was supplied where d >= 1 is required."""


class FalsificationError(NipregError, AssertionError):
    """A proved inequality failed on a concrete instance."""

    def __init__(self, message: str, counterexample: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.counterexample = counterexample or {}
