"""Dynamical pairs (P_t, a(t)) over the affine line."""

import logging
from dataclasses import dataclass
from typing import Any, Optional, Sequence

from sympy.polys.domains import QQ
from sympy.polys.rings import ring

from polydyn.core.orbit import DEFAULT_MAX_BITS, iterate_orbit
from polydyn.core.poly import Poly, build_pca
from polydyn.core.rings import (
    PARAM,
    PARAM_RING,
    QQ_RING,
    coefficient_bits,
    param_degree,
)
from polydyn.errors import DegreeError, NormalizationError, ParseError, PolydynError
from polydyn.models import (
    DivisorOrder,
    DivisorStatus,
    OrbitKind,
    PairClassification,
    PairKind,
)

logger = logging.getLogger("polydyn")

DEFAULT_Q_MAX = 64

# Two-variable ring used to factor the derivative of a family
_ZT_RING, _Z, _T = ring("z,t", QQ)


@dataclass(frozen=True)
class DynPair:
    """A family P_t over QQ[t] with a marked point a(t)."""

    family: Poly
    marked: Any

    @classmethod
    def of(cls, family: Poly, marked: Any) -> "DynPair":
        if family.degree < 2:
            raise DegreeError(f"Family degree must be at least 2, got {family.degree}")
        return cls(family=family.change_ring(PARAM), marked=PARAM.convert(marked))

    @classmethod
    def parse(cls, text: str) -> "DynPair":
        """Parse ``<family> | <marked>``, e.g. ``2; 1, 0, [0, 1] | 0``."""
        if "|" not in text:
            raise ParseError(f"Expected '<family> | <marked>', got {text!r}")
        family_text, marked_text = text.split("|", 1)
        return cls.of(Poly.parse(family_text.strip()), PARAM.parse(marked_text.strip()))

    @property
    def degree(self) -> int:
        return int(self.family.degree)

    def is_constant(self) -> bool:
        return param_degree(self.marked) <= 0 and all(
            param_degree(c) <= 0 for c in self.family.coeffs
        )


def _coefficient_degree_bound(family: Poly) -> int:
    return max(max(int(param_degree(c)) for c in family.coeffs if c), 0)


def _check_leading(family: Poly) -> None:
    if param_degree(family.leading) > 0:
        raise NormalizationError(
            "Leading coefficient must be constant in t; normalize the family first"
        )


def _as_int_degree(value: float) -> Optional[int]:
    return None if value == float("-inf") else int(value)


def _constant_divisor_order(pair: DynPair, q_max: int, max_bits: int) -> DivisorOrder:
    rational = Poly(QQ_RING, tuple(QQ_RING.convert(c) for c in pair.family.coeffs))
    record = iterate_orbit(rational, QQ_RING.convert(pair.marked), max_steps=q_max, max_bits=max_bits)
    degrees = [0 if z else None for z in record.orbit]
    if record.kind == OrbitKind.PREPERIODIC:
        n = record.tail + record.cycle
        return DivisorOrder(
            status=DivisorStatus.PREPERIODIC,
            q=QQ.zero,
            witness_degrees=degrees,
            preperiodic=(n, record.tail),
        )
    return DivisorOrder(status=DivisorStatus.UNKNOWN, witness_degrees=degrees)


def divisor_order(
    pair: DynPair, q_max: int = DEFAULT_Q_MAX, max_bits: int = DEFAULT_MAX_BITS
) -> DivisorOrder:
    """
    Order q of the divisor at infinity of a pair.

    Degrees deg_t P^n(a) are followed from n = 0. Once a degree exceeds every
    t-degree of the family's coefficients the leading term dominates and
    each later degree is d times the previous one; q is then that degree
    divided by d^n.

    Args:
        pair: The dynamical pair
        q_max: Number of iterates to examine
        max_bits: Size cap on an iterate's coefficients

    Returns:
        DivisorOrder; status unknown when neither growth nor a repeat was seen
    """
    if q_max < 1:
        raise ValueError(f"q_max must be at least 1, got {q_max}")
    family = pair.family
    _check_leading(family)
    if pair.is_constant():
        return _constant_divisor_order(pair, q_max, max_bits)

    d = pair.degree
    bound = _coefficient_degree_bound(family)
    x = pair.marked
    seen: dict = {}
    degrees: list = []
    for n in range(q_max + 1):
        degree = param_degree(x)
        degrees.append(_as_int_degree(degree))
        if degree > bound:
            # One more step witnesses deg_{n+1} = d * deg_n
            following = param_degree(family(x))
            degrees.append(_as_int_degree(following))
            if following != d * degree:
                raise PolydynError(
                    f"Degree of iterate {n + 1} is {following}, expected {d} * {int(degree)}"
                )
            q = QQ(int(degree), d**n)
            logger.debug(f"Divisor order {q} stabilized at n={n}")
            return DivisorOrder(
                status=DivisorStatus.STABILIZED,
                q=q,
                stabilized_at=n,
                witness_degrees=degrees,
            )
        if x in seen:
            m = seen[x]
            logger.debug(f"Marked point stably preperiodic: P^{n}(a) = P^{m}(a)")
            return DivisorOrder(
                status=DivisorStatus.PREPERIODIC,
                q=QQ.zero,
                witness_degrees=degrees,
                preperiodic=(n, m),
            )
        seen[x] = n
        if coefficient_bits(x) > max_bits:
            logger.warning(f"Iterate {n} of the marked point exceeded {max_bits} bits")
            break
        x = family(x)
    return DivisorOrder(status=DivisorStatus.UNKNOWN, witness_degrees=degrees)


def classify_pair(
    pair: DynPair, q_max: int = DEFAULT_Q_MAX, max_bits: int = DEFAULT_MAX_BITS
) -> PairClassification:
    """Active, passive (preperiodic or isotrivial), or unknown."""
    order = divisor_order(pair, q_max, max_bits)
    if order.status == DivisorStatus.STABILIZED and order.q > 0:
        return PairClassification(kind=PairKind.ACTIVE, q=order.q)
    if order.status == DivisorStatus.PREPERIODIC:
        n, m = order.preperiodic
        return PairClassification(kind=PairKind.PASSIVE_PREPERIODIC, q=QQ.zero, n=n, m=m)
    if pair.is_constant():
        return PairClassification(kind=PairKind.PASSIVE_ISOTRIVIAL, q=QQ.zero)
    return PairClassification(kind=PairKind.UNKNOWN)


def _max_order(family: Poly, points: Sequence, q_max: int, max_bits: int) -> Optional[Any]:
    best = QQ.zero
    for point in points:
        order = divisor_order(DynPair.of(family, point), q_max, max_bits)
        if not order.known:
            logger.debug(f"Divisor order of critical point {PARAM.format(point)} is unknown")
            return None
        best = max(best, order.q)
    return best


def family_crit_order(
    c: Sequence, a: Any, q_max: int = DEFAULT_Q_MAX, max_bits: int = DEFAULT_MAX_BITS
) -> Optional[Any]:
    """
    Critical order q(P) of the family P_{c,a}.

    Args:
        c: The d - 2 free critical points, elements of QQ[t]
        a: Parameter with P(0) = a^d
        q_max: Iterates examined per critical point

    Returns:
        The largest divisor order over 0, c_1, ..., c_{d-2}, or None when any is unknown
    """
    c = [PARAM.convert(ci) for ci in c]
    family = build_pca(len(c) + 2, c, PARAM.convert(a), ring=PARAM)
    return _max_order(family, [PARAM.zero] + c, q_max, max_bits)


def _to_zt(family: Poly):
    terms = {}
    for i, coefficient in enumerate(family.low_coefficients()):
        for (k,), value in coefficient.terms():
            terms[(i, k)] = value
    return _ZT_RING.from_dict(terms)


def exact_critical_points(family: Poly) -> Optional[list]:
    """Critical points of a family as elements of QQ[t], or None when some are not polynomial in t."""
    family = family.change_ring(PARAM)
    _check_leading(family)
    derivative = _to_zt(family).diff(_Z)
    _, factors = derivative.factor_list()
    points = []
    for factor, multiplicity in factors:
        z_degree = factor.degree(0)
        if z_degree == 0:
            continue
        if z_degree > 1:
            return None
        slope = {}
        offset = {}
        for (i, k), value in factor.terms():
            (slope if i == 1 else offset)[(k,)] = value
        u = PARAM_RING.from_dict(slope)
        v = PARAM_RING.from_dict(offset)
        if u.degree() > 0:
            return None
        root = -v * PARAM_RING.ground_new(QQ.one / u.LC)
        points.extend([root] * multiplicity)
    return points


def family_crit_order_of(
    family: Poly, q_max: int = DEFAULT_Q_MAX, max_bits: int = DEFAULT_MAX_BITS
) -> Optional[Any]:
    """Critical order of a family given in any form, when its critical points are exact."""
    points = exact_critical_points(family)
    if points is None:
        logger.debug("Critical points are not polynomial in t; no exact critical order")
        return None
    return _max_order(family.change_ring(PARAM), points, q_max, max_bits)


def crit_order_bound(family: Poly) -> Any:
    """Upper bound max_i deg_t(a_i)/i for the critical order of a family."""
    family = family.change_ring(PARAM)
    _check_leading(family)
    d = int(family.degree)
    best = QQ.zero
    for i in range(1, d + 1):
        degree = param_degree(family.coefficient(d - i))
        if degree > 0:
            best = max(best, QQ(int(degree), i))
    return best
