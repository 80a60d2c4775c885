"""Exception hierarchy shared by every module.

Everything raised on purpose derives from :class:`ArborError`, which the CLI
maps to exit code 1 with a JSON error record.
"""

from __future__ import annotations

import os


class ArborError(Exception):
    """Base class for domain errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


# ordinals
class OrdinalError(ArborError, ValueError):
    pass


class OrdinalParseError(OrdinalError):
    pass


# trees and posets
class StructureError(ArborError, ValueError):
    pass


class MultipleRoots(StructureError):
    pass


class CycleDetected(StructureError):
    pass


class DanglingParent(StructureError):
    pass


class InvalidNode(StructureError, IndexError):
    pass


class NotAPartialOrder(StructureError):
    pass


class ParamOutOfRange(ArborError, ValueError):
    pass


class TooManyChains(ArborError):
    pass


# families and diagonal unions
class NotDownwardClosed(ArborError, ValueError):
    pass


class NotAnAntichain(ArborError, ValueError):
    pass


class NotInCone(ArborError, ValueError):
    pass


class BudgetViolated(ArborError, ValueError):
    pass


class AmbientTooLarge(ArborError):
    pass


class SearchBudgetExceeded(ArborError):
    pass


# colorings
class InvalidColor(ArborError, ValueError):
    pass


class NotSpecializing(ArborError, ValueError):
    pass


class NotAPermutation(ArborError, ValueError):
    pass


class NotComparable(ArborError, KeyError):
    pass


# searches
class SearchSpaceTooLarge(ArborError):
    pass


class NoHomogeneousChain(ArborError):
    pass


class NotAChain(ArborError, ValueError):
    pass


class ArityMismatch(ArborError, ValueError):
    pass


class ColorNotInRange(ArborError, ValueError):
    pass


class PigeonholeHypothesisFails(ArborError, ValueError):
    pass


class NodeNotInLevel(ArborError, ValueError):
    pass


GUARD_ENV = "ARBOR_SEARCH_GUARD"


def guard(default: int | float) -> float:
    """Scale a size guard by ``$ARBOR_SEARCH_GUARD``.

    ``off`` (or ``0``) disables the guard; a positive number multiplies it.
    """
    raw = os.environ.get(GUARD_ENV, "").strip().lower()
    if not raw:
        return default
    if raw in ("off", "none", "0"):
        return float("inf")
    try:
        factor = float(raw)
    except ValueError:
        return default
    return default * factor if factor > 0 else default
