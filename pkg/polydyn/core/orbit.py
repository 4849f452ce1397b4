"""Exact forward orbits of rational points and of points over QQ[t]/(f)."""

import logging

from sympy.polys.domains import QQ

from polydyn.core.escape import EscapeCriterion
from polydyn.core.poly import Poly
from polydyn.core.rings import PARAM, coefficient_bits
from polydyn.models import OrbitKind, OrbitRecord

logger = logging.getLogger("polydyn")

DEFAULT_MAX_STEPS = 4096
DEFAULT_MAX_BITS = 1_000_000


def iterate_orbit(
    P: Poly,
    z0,
    max_steps: int = DEFAULT_MAX_STEPS,
    max_bits: int = DEFAULT_MAX_BITS,
) -> OrbitRecord:
    """
    Follow the orbit of z0 until it repeats, escapes, or a cap is hit.

    Args:
        P: Polynomial over the rationals
        z0: Starting point
        max_steps: Maximum number of applications of P
        max_bits: Cap on numerator plus denominator size of an orbit point

    Returns:
        OrbitRecord with kind preperiodic, escaping, or unknown
    """
    if max_steps < 1:
        raise ValueError(f"max_steps must be at least 1, got {max_steps}")
    criterion = EscapeCriterion(P)
    z = QQ.convert(z0)
    seen: dict = {}
    orbit: list = []
    for n in range(max_steps + 1):
        if z in seen:
            tail = seen[z]
            return OrbitRecord(
                kind=OrbitKind.PREPERIODIC,
                orbit=orbit,
                tail=tail,
                cycle=n - tail,
                cycle_values=orbit[tail:],
            )
        seen[z] = n
        orbit.append(z)
        if criterion.escapes(z):
            return OrbitRecord(kind=OrbitKind.ESCAPING, orbit=orbit, escape_step=n)
        if coefficient_bits(z) > max_bits:
            logger.debug(f"Orbit of {z0} under {P} exceeded {max_bits} bits at step {n}")
            return OrbitRecord(kind=OrbitKind.UNKNOWN, orbit=orbit, reason="max_bits")
        if n < max_steps:
            z = P(z)
    logger.debug(f"Orbit of {z0} under {P} unresolved after {max_steps} steps")
    return OrbitRecord(kind=OrbitKind.UNKNOWN, orbit=orbit, reason="max_steps")


def _reduced_image(family: Poly, z, modulus):
    result = PARAM.zero
    for c in family.coeffs:
        result = (result * z + c) % modulus
    return result


def iterate_orbit_at_roots(
    family: Poly,
    z0,
    modulus,
    max_steps: int = DEFAULT_MAX_STEPS,
    max_bits: int = DEFAULT_MAX_BITS,
) -> OrbitRecord:
    """
    Follow the orbit of z0(t) under P_t in QQ[t]/(modulus).

    A repeat modulo the modulus is a repeat of the specialized orbit at every
    root t0 of the modulus, so one run settles all of its roots at once. There
    is no escape test: the result is preperiodic or unknown.

    Args:
        family: Polynomial over QQ or QQ[t]
        z0: Starting point, an element of QQ[t]
        modulus: Element of QQ[t] of positive degree
        max_steps: Maximum number of applications of P
        max_bits: Cap on the coefficient size of a reduced orbit point

    Returns:
        OrbitRecord whose orbit holds the reduced iterates
    """
    if max_steps < 1:
        raise ValueError(f"max_steps must be at least 1, got {max_steps}")
    modulus = PARAM.convert(modulus)
    if modulus.degree() < 1:
        raise ValueError(f"Modulus must have positive degree in t, got {PARAM.format(modulus)}")
    family = family.change_ring(PARAM)
    z = PARAM.convert(z0) % modulus
    seen: dict = {}
    orbit: list = []
    for n in range(max_steps + 1):
        if z in seen:
            tail = seen[z]
            return OrbitRecord(
                kind=OrbitKind.PREPERIODIC,
                orbit=orbit,
                tail=tail,
                cycle=n - tail,
                cycle_values=orbit[tail:],
            )
        seen[z] = n
        orbit.append(z)
        if coefficient_bits(z) > max_bits:
            logger.debug(f"Orbit modulo {PARAM.format(modulus)} exceeded {max_bits} bits at step {n}")
            return OrbitRecord(kind=OrbitKind.UNKNOWN, orbit=orbit, reason="max_bits")
        if n < max_steps:
            z = _reduced_image(family, z, modulus)
    logger.debug(f"Orbit modulo {PARAM.format(modulus)} unresolved after {max_steps} steps")
    return OrbitRecord(kind=OrbitKind.UNKNOWN, orbit=orbit, reason="max_steps")
