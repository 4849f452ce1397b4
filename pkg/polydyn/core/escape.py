"""Escape criteria.

Once an orbit point passes a criterion, every later point passes it too and
the moduli increase to infinity.
"""

from typing import Sequence

from sympy.polys.domains import QQ

from polydyn.core.poly import Poly
from polydyn.core.rings import RationalRing
from polydyn.errors import DegreeError, RingMismatchError


def _is_unicritical(low: Sequence) -> bool:
    return low[-1] == 1 and all(not c for c in low[1:-1])


class EscapeCriterion:
    """Escape test for a fixed polynomial with rational coefficients.

    For z^d + c the radius is max(2, |c|) with strict growth |z|^d - |c| > |z|.
    Otherwise, writing S = sum |a_i / a_0|, a point escapes when
    |z| > max(1, 2S) and |a_0| |z|^(d-1) >= 4; then |P(z)| >= 2|z|.
    """

    def __init__(self, P: Poly):
        if not isinstance(P.ring, RationalRing):
            raise RingMismatchError("Escape criteria need rational coefficients")
        if P.degree < 2:
            raise DegreeError(f"Degree must be at least 2, got {P.degree}")
        self.degree = int(P.degree)
        low = P.low_coefficients()
        self.unicritical = _is_unicritical(low)
        self.c_abs = abs(low[0])
        lead = abs(P.leading)
        ratio_sum = sum((abs(c) / lead for c in P.coeffs[1:]), QQ.zero)
        self.radius = max(QQ.one, 2 * ratio_sum)
        self.power_bound = QQ(4) / lead
        self._float = FloatEscapeCriterion(P.complex_coefficients())

    def escapes(self, z) -> bool:
        """Exact test at a rational point."""
        r = abs(QQ.convert(z))
        if self.unicritical:
            return r >= max(QQ(2), self.c_abs) and r**self.degree - self.c_abs > r
        return r > self.radius and r ** (self.degree - 1) >= self.power_bound

    def escapes_complex(self, z: complex) -> bool:
        return self._float.escapes(z)


class FloatEscapeCriterion:
    """Floating twin of ``EscapeCriterion`` for complex coefficients (leading first)."""

    def __init__(self, coefficients: Sequence[complex]):
        coefficients = [complex(c) for c in coefficients]
        if len(coefficients) < 3 or coefficients[0] == 0:
            raise DegreeError("Need a polynomial of degree at least 2")
        self.degree = len(coefficients) - 1
        low = list(reversed(coefficients))
        self.unicritical = low[-1] == 1 and all(c == 0 for c in low[1:-1])
        self.c_abs = abs(low[0])
        lead = abs(coefficients[0])
        self.ratio_sum = sum(abs(c) / lead for c in coefficients[1:])
        self.radius = max(1.0, 2.0 * self.ratio_sum)
        self.power_bound = 4.0 / lead

    def escapes(self, z: complex) -> bool:
        r = abs(z)
        if self.unicritical:
            return r >= max(2.0, self.c_abs) and r**self.degree - self.c_abs > r
        return r > self.radius and r ** (self.degree - 1) >= self.power_bound
