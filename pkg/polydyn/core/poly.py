"""Univariate polynomials over the exact coefficient rings.

Coefficients are stored leading-first, matching the text form
``d; a0, a1, ..., ad`` for P(z) = a0 z^d + a1 z^(d-1) + ... + ad.
"""

import logging
import math
import re
from dataclasses import dataclass
from typing import Any, Callable, Optional, Sequence, Union

from sympy.polys.domains import QQ

from polydyn.core.rings import (
    NEG_INF,
    PARAM,
    QQ_RING,
    AlgExtRing,
    ParamRing,
    RationalRing,
    Ring,
    rational_root,
    ring_of,
)
from polydyn.errors import (
    DegreeError,
    NormalizationError,
    NotInvertibleError,
    ParseError,
    RingMismatchError,
)
from polydyn.models import Monomial, ReducedPresentation

logger = logging.getLogger("polydyn")

# Top-level comma split that keeps [..] parameter coefficients intact
_COEFF_TOKEN_RE = re.compile(r"\[[^\]]*\]|[^,\[\]]+")


@dataclass(frozen=True)
class Poly:
    """Polynomial with exact coefficients, leading coefficient first.

    Leading zeros are stripped on construction; the zero polynomial has an
    empty coefficient tuple and degree -inf.
    """

    ring: Ring
    coeffs: tuple

    def __post_init__(self):
        converted = [self.ring.convert(c) for c in self.coeffs]
        start = 0
        while start < len(converted) and self.ring.is_zero(converted[start]):
            start += 1
        object.__setattr__(self, "coeffs", tuple(converted[start:]))

    # Construction -------------------------------------------------------

    @classmethod
    def from_low(cls, ring: Ring, coefficients: Sequence) -> "Poly":
        """Build from coefficients of z^0, z^1, ..."""
        return cls(ring, tuple(reversed(list(coefficients))))

    @classmethod
    def constant(cls, ring: Ring, value: Any) -> "Poly":
        return cls(ring, (value,))

    @classmethod
    def monomial(cls, ring: Ring, n: int, value: Any = None) -> "Poly":
        lead = ring.one if value is None else value
        return cls(ring, (lead,) + tuple(ring.zero for _ in range(n)))

    @classmethod
    def identity(cls, ring: Ring) -> "Poly":
        return cls.monomial(ring, 1)

    @classmethod
    def parse(cls, text: str) -> "Poly":
        """Parse the canonical text form ``d; a0, a1, ..., ad``."""
        if ";" not in text:
            raise ParseError(f"Expected 'd; a0, ..., ad', got {text!r}")
        head, body = text.split(";", 1)
        try:
            degree = int(head.strip())
        except ValueError as e:
            raise ParseError(f"Bad degree {head.strip()!r}") from e
        tokens = [tok.strip() for tok in _COEFF_TOKEN_RE.findall(body.replace(" ", ""))]
        tokens = [tok for tok in tokens if tok]
        if len(tokens) != degree + 1:
            raise ParseError(
                f"Degree {degree} needs {degree + 1} coefficients, got {len(tokens)}"
            )
        ring: Ring = PARAM if any(tok.startswith("[") for tok in tokens) else QQ_RING
        poly = cls(ring, tuple(ring.parse(tok) for tok in tokens))
        if poly.degree != degree:
            raise ParseError(f"Leading coefficient of {text!r} is zero")
        return poly

    # Basic properties ---------------------------------------------------

    @property
    def degree(self) -> Union[int, float]:
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    @property
    def leading(self) -> Any:
        return self.coeffs[0] if self.coeffs else self.ring.zero

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, i: int) -> Any:
        """Coefficient of z^i."""
        if self.is_zero or i < 0 or i > self.degree:
            return self.ring.zero
        return self.coeffs[self.degree - i]

    def low_coefficients(self) -> list:
        """Coefficients of z^0, z^1, ..., z^d."""
        return list(reversed(self.coeffs))

    def support(self) -> list[int]:
        """Exponents carrying a nonzero coefficient, increasing."""
        return [i for i, c in enumerate(self.low_coefficients()) if not self.ring.is_zero(c)]

    def is_monic(self) -> bool:
        return not self.is_zero and self.leading == self.ring.one

    def is_centered(self) -> bool:
        return self.degree < 1 or self.ring.is_zero(self.coefficient(self.degree - 1))

    # Arithmetic ---------------------------------------------------------

    def _unify(self, other: Any) -> tuple["Poly", "Poly"]:
        if not isinstance(other, Poly):
            return self, Poly.constant(self.ring, other)
        if other.ring == self.ring:
            return self, other
        if self.ring.embeds(other.ring):
            return self, other.change_ring(self.ring)
        if other.ring.embeds(self.ring):
            return self.change_ring(other.ring), other
        raise RingMismatchError(f"Cannot combine {self.ring} and {other.ring}")

    def __add__(self, other: Any) -> "Poly":
        a, b = self._unify(other)
        la, lb = a.low_coefficients(), b.low_coefficients()
        n = max(len(la), len(lb))
        la += [a.ring.zero] * (n - len(la))
        lb += [a.ring.zero] * (n - len(lb))
        return Poly.from_low(a.ring, [x + y for x, y in zip(la, lb)])

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(self.ring, tuple(-c for c in self.coeffs))

    def __sub__(self, other: Any) -> "Poly":
        a, b = self._unify(other)
        return a + (-b)

    def __rsub__(self, other: Any) -> "Poly":
        a, b = self._unify(other)
        return b + (-a)

    def __mul__(self, other: Any) -> "Poly":
        if not isinstance(other, Poly):
            scalar = self.ring.convert(other)
            return Poly(self.ring, tuple(c * scalar for c in self.coeffs))
        a, b = self._unify(other)
        if a.is_zero or b.is_zero:
            return Poly(a.ring, ())
        la, lb = a.low_coefficients(), b.low_coefficients()
        result = [a.ring.zero] * (len(la) + len(lb) - 1)
        for i, x in enumerate(la):
            if a.ring.is_zero(x):
                continue
            for j, y in enumerate(lb):
                if not a.ring.is_zero(y):
                    result[i + j] = result[i + j] + x * y
        return Poly.from_low(a.ring, result)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("Negative powers of polynomials are not polynomials")
        result = Poly.constant(self.ring, self.ring.one)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        """Euclidean division; ``other`` must have an invertible leading coefficient."""
        a, b = self._unify(other)
        if b.is_zero:
            raise ZeroDivisionError("Polynomial division by zero")
        lead_inv = b.ring.inverse(b.leading)
        remainder = a.low_coefficients()
        divisor = b.low_coefficients()
        db = len(divisor) - 1
        quotient = [a.ring.zero] * max(0, len(remainder) - db)
        for k in range(len(remainder) - 1, db - 1, -1):
            c = remainder[k]
            if a.ring.is_zero(c):
                continue
            factor = c * lead_inv
            quotient[k - db] = factor
            for j, y in enumerate(divisor):
                remainder[k - db + j] = remainder[k - db + j] - factor * y
        return Poly.from_low(a.ring, quotient), Poly.from_low(a.ring, remainder[:db])

    # Dynamics -----------------------------------------------------------

    def __call__(self, x: Any) -> Any:
        """Evaluate at a ring element by Horner's rule."""
        result = self.ring.zero
        for c in self.coeffs:
            result = result * x + c
        return result

    def compose(self, other: "Poly") -> "Poly":
        """Return self∘other."""
        if not isinstance(other, Poly):
            raise TypeError("compose expects a Poly")
        if other.ring != self.ring:
            raise RingMismatchError(f"compose over {self.ring} and {other.ring}")
        result = Poly(self.ring, ())
        for c in self.coeffs:
            result = result * other + c
        return result

    def iterate(self, n: int) -> "Poly":
        """The n-th compositional iterate (identity for n = 0)."""
        if n < 0:
            raise ValueError("Iterate count must be non-negative")
        result = Poly.identity(self.ring)
        for _ in range(n):
            result = self.compose(result)
        return result

    def derivative(self) -> "Poly":
        low = self.low_coefficients()
        return Poly.from_low(self.ring, [c * i for i, c in enumerate(low)][1:])

    def local_degree(self, x: Any) -> int:
        """Order of vanishing of P - P(x) at x."""
        if self.degree < 1:
            raise DegreeError("Local degree of a constant polynomial")
        current = self.derivative()
        order = 1
        while self.ring.is_zero(current(x)):
            current = current.derivative()
            order += 1
        return order

    def change_ring(self, ring: Ring) -> "Poly":
        if ring == self.ring:
            return self
        if not ring.embeds(self.ring):
            raise RingMismatchError(f"{self.ring} does not embed in {ring}")
        return Poly(ring, tuple(ring.convert(c) for c in self.coeffs))

    def map_coefficients(self, fn: Callable[[Any], Any], ring: Optional[Ring] = None) -> "Poly":
        return Poly(ring or self.ring, tuple(fn(c) for c in self.coeffs))

    def complex_coefficients(self) -> list[complex]:
        """Leading-first complex coefficients (rational ring only)."""
        if not isinstance(self.ring, RationalRing):
            raise RingMismatchError(f"{self.ring} has no complex embedding here")
        return [self.ring.to_complex(c) for c in self.coeffs]

    # Text ---------------------------------------------------------------

    def format(self) -> str:
        if self.is_zero:
            return "0; 0"
        return f"{self.degree}; " + ", ".join(self.ring.format(c) for c in self.coeffs)

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        terms = []
        for i in range(int(self.degree), -1, -1):
            c = self.coefficient(i)
            if self.ring.is_zero(c):
                continue
            text = self.ring.format(c)
            power = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
            if not power:
                terms.append(text)
            elif text == "1":
                terms.append(power)
            else:
                terms.append(f"({text})*{power}")
        return " + ".join(terms)


def compose(P: Poly, Q: Poly) -> Poly:
    """Return P∘Q; both polynomials must share a coefficient ring."""
    return P.compose(Q)


def adjoin_root(value: Any, e: int, ring: Ring) -> tuple[Any, Ring]:
    """Find an e-th root of ``value``, extending ``ring`` when none exists.

    Returns the root and the ring it lives in. Over the parameter ring the
    value must be constant in t.
    """
    value = ring.convert(value)
    if ring.is_zero(value):
        raise NotInvertibleError("Zero has no invertible root")
    if e == 1:
        return value, ring
    if isinstance(ring, RationalRing):
        root = rational_root(value, e)
        if root is not None:
            return root, ring
        ext = AlgExtRing(e, value, QQ_RING)
        return ext.generator, ext
    if isinstance(ring, ParamRing):
        if value.degree() > 0:
            raise NormalizationError(
                "Leading coefficient must be constant in t; normalize the family first"
            )
        constant = value.get((0,), QQ.zero)
        root = rational_root(constant, e)
        if root is not None:
            return ring.convert(root), ring
        ext = AlgExtRing(e, constant, PARAM)
        return ext.generator, ext
    if isinstance(ring, AlgExtRing):
        if value.is_scalar():
            scalar = value.coords[0]
            if isinstance(ring.base, RationalRing):
                root = rational_root(scalar, e)
                if root is not None:
                    return ring.scalar(root), ring
            elif scalar.degree() <= 0:
                root = rational_root(scalar.get((0,), QQ.zero), e)
                if root is not None:
                    return ring.scalar(root), ring
            if ring.e == e and scalar == ring.modulus:
                return ring.generator, ring
        raise NotInvertibleError(f"No {e}-th root of {ring.format(value)} in {ring}")
    raise RingMismatchError(f"Unsupported ring {ring}")


def build_pca(d: int, c: Sequence, a: Any, ring: Optional[Ring] = None) -> Poly:
    """The critically marked polynomial P_{c,a}.

    P_{c,a}(z) = z^d/d + sum_{j=2}^{d-1} (-1)^(d-j) sigma_{d-j}(c) z^j/j + a^d,
    whose derivative is z * prod(z - c_i).
    """
    if d < 2:
        raise DegreeError(f"Degree must be at least 2, got {d}")
    if len(c) != d - 2:
        raise DegreeError(f"Degree {d} needs {d - 2} critical points, got {len(c)}")
    ring = ring or ring_of(list(c) + [a])
    derivative = Poly.identity(ring)
    for ci in c:
        derivative = derivative * Poly(ring, (ring.one, -ring.convert(ci)))
    low = derivative.low_coefficients()
    integrated = [ring.zero] + [coef * QQ(1, j + 1) for j, coef in enumerate(low)]
    a = ring.convert(a)
    a_power = ring.one
    for _ in range(d):
        a_power = a_power * a
    integrated[0] = a_power
    return Poly.from_low(ring, integrated)


def normalize_monic_centered(P: Poly) -> tuple[Poly, Any, Any]:
    """Conjugate P by phi(z) = scale*z + shift to a monic centered polynomial.

    The ring is extended by a (d-1)-th root of the leading coefficient when
    none exists.

    Returns:
        (Q, scale, shift) with Q = phi∘P∘phi^-1
    """
    d = P.degree
    if d < 2:
        raise DegreeError(f"Degree must be at least 2, got {d}")
    if not P.ring.is_field:
        raise NormalizationError(f"{P.ring} is not a field")
    scale, ring = adjoin_root(P.leading, int(d) - 1, P.ring)
    P = P.change_ring(ring)
    a0, a1 = P.leading, P.coefficient(int(d) - 1)
    shift = scale * a1 * ring.inverse(a0 * d)
    scale_inv = ring.inverse(scale)
    inverse_map = Poly(ring, (scale_inv, -(scale_inv * shift)))
    Q = P.compose(inverse_map) * scale + shift
    logger.debug(f"Normalized {P} to {Q} (scale {ring.format(scale)}, shift {ring.format(shift)})")
    return Q, scale, shift


def reduced_presentation(P: Poly) -> Union[ReducedPresentation, Monomial]:
    """Write P(z) = z^mu * P0(z^m) with P0(0) != 0 and m maximal."""
    d = P.degree
    if d < 2:
        raise DegreeError(f"Degree must be at least 2, got {d}")
    if not P.is_monic() or not P.is_centered():
        raise NormalizationError(f"{P} is not monic and centered")
    support = P.support()
    if support == [d]:
        return Monomial(degree=int(d))
    mu = support[0]
    m = 0
    for e in support:
        m = math.gcd(m, e - mu)
    low = [P.ring.zero] * ((int(d) - mu) // m + 1)
    for e in support:
        low[(e - mu) // m] = P.coefficient(e)
    return ReducedPresentation(mu=mu, m=m, p0=Poly.from_low(P.ring, low))
