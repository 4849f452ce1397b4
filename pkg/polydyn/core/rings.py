"""Exact coefficient rings.

Three rings are supported: the rationals, polynomials in the parameter t with
rational coefficients, and binomial extensions base[alpha]/(alpha^e - A) over
either of them. Rational and parameter elements are native sympy objects
(QQ elements and PolyElements of ``PARAM_RING``); extension elements are
``AlgElement`` values defined here.
"""

import logging
import re
from dataclasses import dataclass
from typing import Any, Optional, Sequence

from sympy import integer_nthroot
from sympy.polys.domains import QQ
from sympy.polys.euclidtools import dup_invert
from sympy.polys.polyerrors import CoercionFailed, NotInvertible
from sympy.polys.rings import PolyElement, ring

from polydyn.errors import NotInvertibleError, ParseError, RingMismatchError

logger = logging.getLogger("polydyn")

PARAM_RING, T = ring("t", QQ)

NEG_INF = float("-inf")

_RATIONAL_RE = re.compile(r"^([+-]?\d+)(?:/(\d+))?$")


def parse_rational(text: str):
    """Parse ``p`` or ``p/q`` into a QQ element."""
    match = _RATIONAL_RE.match(text.strip())
    if not match:
        raise ParseError(f"Not a rational number: {text!r}")
    numerator = int(match.group(1))
    denominator = int(match.group(2)) if match.group(2) else 1
    if denominator == 0:
        raise ParseError(f"Zero denominator in {text!r}")
    return QQ(numerator, denominator)


def format_rational(value) -> str:
    """Format a QQ element as ``p`` or ``p/q``."""
    value = QQ.convert(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def rational_root(value, e: int):
    """Return the rational e-th root of ``value`` if it exists, else None."""
    value = QQ.convert(value)
    if e == 1:
        return value
    if value == 0:
        return QQ.zero
    sign = 1
    if value < 0:
        if e % 2 == 0:
            return None
        sign = -1
    num_root, num_exact = integer_nthroot(abs(int(value.numerator)), e)
    den_root, den_exact = integer_nthroot(int(value.denominator), e)
    if not (num_exact and den_exact):
        return None
    return QQ(sign * num_root, den_root)


def param_degree(value) -> float:
    """Degree in t of a rational or parameter element; -inf for zero."""
    if isinstance(value, PolyElement):
        return value.degree()
    return NEG_INF if not value else 0


def param_coefficients(value) -> list:
    """Low-first coefficient list of a parameter element (``[0]`` for zero)."""
    if not value:
        return [QQ.zero]
    degree = int(value.degree())
    return [value.get((i,), QQ.zero) for i in range(degree + 1)]


def param_from_coefficients(coefficients: Sequence) -> PolyElement:
    """Build a parameter element from low-first rational coefficients."""
    return PARAM_RING.from_dict(
        {(i,): QQ.convert(c) for i, c in enumerate(coefficients) if c}
    )


def coefficient_bits(value) -> int:
    """Total bit size of numerators and denominators in an exact element."""
    if isinstance(value, PolyElement):
        return sum(coefficient_bits(c) for c in value.values())
    if isinstance(value, AlgElement):
        return sum(coefficient_bits(c) for c in value.coords)
    value = QQ.convert(value)
    return int(value.numerator).bit_length() + int(value.denominator).bit_length()


class Ring:
    """Interface shared by the three coefficient rings."""

    name = "ring"
    is_field = False

    @property
    def zero(self) -> Any:
        raise NotImplementedError

    @property
    def one(self) -> Any:
        raise NotImplementedError

    def convert(self, value: Any) -> Any:
        raise NotImplementedError

    def is_zero(self, value: Any) -> bool:
        return not value

    def inverse(self, value: Any) -> Any:
        raise NotImplementedError

    def div(self, x: Any, y: Any) -> Any:
        return self.convert(x) * self.inverse(y)

    def format(self, value: Any) -> str:
        raise NotImplementedError

    def parse(self, text: str) -> Any:
        raise NotImplementedError

    def embeds(self, other: "Ring") -> bool:
        """True when every element of ``other`` converts into this ring."""
        return other == self

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class RationalRing(Ring):
    """The field QQ."""

    name = "QQ"
    is_field = True

    @property
    def zero(self):
        return QQ.zero

    @property
    def one(self):
        return QQ.one

    def convert(self, value):
        if isinstance(value, str):
            return parse_rational(value)
        if isinstance(value, PolyElement):
            if value.degree() > 0:
                raise RingMismatchError(f"Parameter element {value} is not rational")
            return value.get((0,), QQ.zero)
        if isinstance(value, AlgElement):
            raise RingMismatchError("Extension element is not rational")
        try:
            return QQ.convert(value)
        except CoercionFailed as e:
            raise RingMismatchError(f"Cannot convert {value!r} to a rational") from e

    def inverse(self, value):
        value = self.convert(value)
        if not value:
            raise NotInvertibleError("Zero is not invertible")
        return QQ.one / value

    def format(self, value) -> str:
        return format_rational(value)

    def parse(self, text: str):
        return parse_rational(text)

    def to_complex(self, value) -> complex:
        value = self.convert(value)
        return complex(int(value.numerator) / int(value.denominator))


@dataclass(frozen=True)
class ParamRing(Ring):
    """Polynomials in the parameter t with rational coefficients."""

    name = "QQ[t]"

    @property
    def zero(self):
        return PARAM_RING.zero

    @property
    def one(self):
        return PARAM_RING.one

    def convert(self, value):
        if isinstance(value, str):
            return self.parse(value)
        if isinstance(value, PolyElement):
            if value.ring != PARAM_RING:
                raise RingMismatchError(f"Element of {value.ring} is not in {self.name}")
            return value
        if isinstance(value, AlgElement):
            raise RingMismatchError("Extension element is not in QQ[t]")
        try:
            return PARAM_RING.ground_new(QQ.convert(value))
        except CoercionFailed as e:
            raise RingMismatchError(f"Cannot convert {value!r} to {self.name}") from e

    def inverse(self, value):
        value = self.convert(value)
        if not value or value.degree() > 0:
            raise NotInvertibleError(f"{self.format(value)} is not a unit in {self.name}")
        return PARAM_RING.ground_new(QQ.one / value.get((0,), QQ.zero))

    def format(self, value) -> str:
        coefficients = param_coefficients(self.convert(value))
        return "[" + ", ".join(format_rational(c) for c in coefficients) + "]"

    def parse(self, text: str):
        text = text.strip()
        if text.startswith("[") and text.endswith("]"):
            body = text[1:-1].strip()
            if not body:
                return PARAM_RING.zero
            return param_from_coefficients(
                [parse_rational(part) for part in body.split(",")]
            )
        return PARAM_RING.ground_new(parse_rational(text))

    def embeds(self, other: Ring) -> bool:
        return isinstance(other, (RationalRing, ParamRing))


QQ_RING = RationalRing()
PARAM = ParamRing()


@dataclass(frozen=True)
class AlgExtRing(Ring):
    """The extension base[alpha] / (alpha^e - A).

    Args:
        e: Degree of the binomial relation
        modulus: A, an element of ``base``
        base: Rational or parameter ring
    """

    e: int
    modulus: Any
    base: Ring = QQ_RING

    def __post_init__(self):
        if self.e < 1:
            raise ValueError(f"Extension degree must be positive, got {self.e}")
        if isinstance(self.base, AlgExtRing):
            raise RingMismatchError("Nested extensions are not supported")
        object.__setattr__(self, "modulus", self.base.convert(self.modulus))

    @property
    def name(self) -> str:
        return f"{self.base.name}[alpha]/(alpha^{self.e} - {self.base.format(self.modulus)})"

    @property
    def is_field(self) -> bool:
        return self.base.is_field

    @property
    def zero(self) -> "AlgElement":
        return AlgElement(self, tuple(self.base.zero for _ in range(self.e)))

    @property
    def one(self) -> "AlgElement":
        return self.scalar(self.base.one)

    @property
    def generator(self) -> "AlgElement":
        """The adjoined root alpha."""
        if self.e == 1:
            return self.scalar(self.modulus)
        coords = [self.base.zero] * self.e
        coords[1] = self.base.one
        return AlgElement(self, tuple(coords))

    def scalar(self, value) -> "AlgElement":
        coords = [self.base.zero] * self.e
        coords[0] = self.base.convert(value)
        return AlgElement(self, tuple(coords))

    def convert(self, value) -> "AlgElement":
        if isinstance(value, AlgElement):
            if value.ring != self:
                raise RingMismatchError(f"Element of {value.ring} is not in {self}")
            return value
        return self.scalar(value)

    def embeds(self, other: Ring) -> bool:
        return other == self or self.base.embeds(other)

    def inverse(self, value) -> "AlgElement":
        value = self.convert(value)
        support = [i for i, c in enumerate(value.coords) if c]
        if not support:
            raise NotInvertibleError("Zero is not invertible")
        if len(support) == 1:
            # c * alpha^i has inverse c^-1 * alpha^(e-i) / A
            i = support[0]
            c_inv = self.base.inverse(value.coords[i])
            if i == 0:
                return self.scalar(c_inv)
            coords = [self.base.zero] * self.e
            coords[self.e - i] = c_inv * self.base.inverse(self.modulus)
            return AlgElement(self, tuple(coords))
        if not isinstance(self.base, RationalRing):
            raise NotInvertibleError(
                f"Only monomials are invertible over {self.base.name}, got {self.format(value)}"
            )
        f = list(reversed(value.coords))
        g = [QQ.one] + [QQ.zero] * (self.e - 1) + [-self.modulus]
        try:
            inv = dup_invert(f, g, QQ)
        except NotInvertible as e:
            raise NotInvertibleError(f"{self.format(value)} is a zero divisor") from e
        coords = list(reversed(inv)) + [QQ.zero] * (self.e - len(inv))
        return AlgElement(self, tuple(coords))

    def format(self, value) -> str:
        value = self.convert(value)
        terms = []
        for i, c in enumerate(value.coords):
            if not c:
                continue
            text = self.base.format(c)
            if i == 0:
                terms.append(text)
            else:
                power = "alpha" if i == 1 else f"alpha^{i}"
                terms.append(power if text == "1" else f"({text})*{power}")
        return " + ".join(terms) if terms else "0"

    def parse(self, text: str):
        return self.scalar(self.base.parse(text))

    def to_complex(self, value, alpha: complex) -> complex:
        """Embed ``value`` in C given a numeric root ``alpha``."""
        value = self.convert(value)
        base = self.base
        if not isinstance(base, RationalRing):
            raise RingMismatchError("Only rational extensions embed in C")
        return sum(base.to_complex(c) * alpha**i for i, c in enumerate(value.coords))


class AlgElement:
    """Element of an ``AlgExtRing``; ``coords`` are coefficients of 1, alpha, ..."""

    __slots__ = ("ring", "coords")

    def __init__(self, ext_ring: AlgExtRing, coords: tuple):
        self.ring = ext_ring
        self.coords = coords

    def _coerce(self, other) -> Optional["AlgElement"]:
        if isinstance(other, AlgElement):
            if other.ring != self.ring:
                raise RingMismatchError(f"{self.ring} and {other.ring} differ")
            return other
        try:
            return self.ring.scalar(other)
        except (RingMismatchError, CoercionFailed):
            return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return AlgElement(self.ring, tuple(a + b for a, b in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __neg__(self):
        return AlgElement(self.ring, tuple(-a for a in self.coords))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if not isinstance(other, AlgElement):
            try:
                scalar = self.ring.base.convert(other)
            except (RingMismatchError, CoercionFailed):
                return NotImplemented
            return AlgElement(self.ring, tuple(a * scalar for a in self.coords))
        other = self._coerce(other)
        e = self.ring.e
        base = self.ring.base
        result = [base.zero] * e
        for i, a in enumerate(self.coords):
            if not a:
                continue
            for j, b in enumerate(other.coords):
                if not b:
                    continue
                if i + j < e:
                    result[i + j] += a * b
                else:
                    result[i + j - e] += a * b * self.ring.modulus
        return AlgElement(self.ring, tuple(result))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * self.ring.inverse(other)

    def __rtruediv__(self, other):
        return self.ring.convert(other) * self.ring.inverse(self)

    def __pow__(self, n: int):
        if n < 0:
            return self.ring.inverse(self) ** (-n)
        result = self.ring.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __bool__(self) -> bool:
        return any(bool(c) for c in self.coords)

    def __eq__(self, other) -> bool:
        try:
            other = self._coerce(other)
        except RingMismatchError:
            return False
        if other is None:
            return False
        return self.coords == other.coords

    def __hash__(self) -> int:
        return hash((self.ring.e, self.coords))

    def is_scalar(self) -> bool:
        return not any(bool(c) for c in self.coords[1:])

    def __repr__(self) -> str:
        return f"AlgElement({self.ring.format(self)})"


def ring_of(values: Sequence) -> Ring:
    """Smallest supported ring holding every value in ``values``."""
    ext = None
    param = False
    for value in values:
        if isinstance(value, AlgElement):
            if ext is not None and ext != value.ring:
                raise RingMismatchError(f"{ext} and {value.ring} differ")
            ext = value.ring
        elif isinstance(value, PolyElement):
            param = True
    if ext is not None:
        if param and not isinstance(ext.base, ParamRing):
            raise RingMismatchError(f"{ext} cannot hold parameter elements")
        return ext
    return PARAM if param else QQ_RING
