"""Exceptions raised by polydyn.

Every domain error derives from ValueError so callers can treat malformed
input and unsatisfied preconditions the same way.
"""

from typing import Optional


class PolydynError(ValueError):
    """Base class for polydyn domain errors."""


class ParseError(PolydynError):
    """Text input does not follow the canonical format."""


class RingMismatchError(PolydynError):
    """Operands live over different coefficient rings."""


class NotInvertibleError(PolydynError):
    """An element that must be a unit is not invertible in its ring."""


class DegreeError(PolydynError):
    """A degree precondition does not hold."""


class NormalizationError(PolydynError):
    """Input is not in the required normal form (monic, centered, constant leading term)."""


class TruncationError(PolydynError):
    """A coefficient beyond the computed truncation order was requested."""


class CriticalPointsError(PolydynError):
    """Critical points cannot be represented exactly."""


class GraphIncompleteError(PolydynError):
    """A graph query needs fully resolved orbits."""


class GraphDepthMismatchError(PolydynError):
    """Two graphs were truncated at different depths."""


class AngleConstructionError(PolydynError):
    """An angle construction failed its own verification."""


class PortraitError(PolydynError):
    """A critical portrait request violates one of its conditions."""

    def __init__(self, condition: str, message: Optional[str] = None):
        self.condition = condition
        super().__init__(f"{condition}: {message}" if message else condition)
