"""Exception types shared across the package."""

from __future__ import annotations

from dataclasses import dataclass


class MaxPlusGameError(Exception):
    """Base class for every error raised by this package."""

    kind = "Error"


class SpaceMismatch(MaxPlusGameError):
    kind = "SpaceMismatch"


class InvalidDensity(MaxPlusGameError):
    kind = "InvalidDensity"


class NotPossibility(MaxPlusGameError):
    kind = "NotPossibility"


class EmptyDeviationSet(MaxPlusGameError):
    kind = "EmptyDeviationSet"


class GuardExceeded(MaxPlusGameError):
    """A combinatorial size limit would be exceeded."""

    kind = "GuardExceeded"


class NoFixedPoint(MaxPlusGameError):
    """Best-response iteration entered a cycle."""

    kind = "NoFixedPoint"

    def __init__(self, message: str, cycle: list | None = None):
        super().__init__(message)
        self.cycle = cycle or []


class FormatError(MaxPlusGameError):
    """Malformed input document."""

    kind = "FormatError"


@dataclass(frozen=True)
class Violation:
    """One broken capacity constraint.

    ``kind`` is one of ``BoundaryViolation``, ``RangeViolation`` or
    ``MonotonicityViolation``. Monotonicity violations carry the witness
    cover pair ``(subset, superset)`` as masks.
    """

    kind: str
    detail: str
    subset: int | None = None
    superset: int | None = None


class InvalidCapacity(MaxPlusGameError):
    kind = "InvalidCapacity"

    def __init__(self, violations: list[Violation]):
        self.violations = list(violations)
        kinds = sorted({v.kind for v in self.violations})
        super().__init__(f"{len(self.violations)} violation(s): {', '.join(kinds)}")
