"""Floating-point Green functions and escape radii.

g_P(z) = lim d^-n log+|P^n(z)| is approximated by iterating until the escape
criterion fires and then until the lower-order terms are negligible. With
s = sum |a_i/a_0| |z|^-i <= 1/2 at the last point z_n,

    |g_P(z) - (log|z_n| + log|a_0|/(d-1)) / d^n| <= 2 s / ((d-1) d^n).
"""

import logging
import math
import sys
from functools import lru_cache
from typing import Sequence, Union

import numpy as np

from polydyn.core.escape import FloatEscapeCriterion
from polydyn.core.poly import Poly
from polydyn.errors import DegreeError
from polydyn.models import EscapeBox, GreenValue

logger = logging.getLogger("polydyn")

DEFAULT_N_MAX = 500

# Iteration continues past escape until the tail terms drop below this
_TAIL_EPSILON = 1e-18
_MAX_EXTRA_STEPS = 64
_ROUNDING = 64 * sys.float_info.epsilon

PolyLike = Union[Poly, Sequence[complex]]


def _complex_coefficients(P: PolyLike) -> list[complex]:
    if isinstance(P, Poly):
        return P.complex_coefficients()
    return [complex(c) for c in P]


def _horner(coefficients: Sequence[complex], z: complex) -> complex:
    result = 0j
    for c in coefficients:
        result = result * z + c
    return result


def green_value(P: PolyLike, z: complex, n_max: int = DEFAULT_N_MAX) -> GreenValue:
    """
    Approximate g_P(z) with an explicit error bound.

    Args:
        P: Rational polynomial or complex coefficients, leading first
        z: Point of the plane
        n_max: Iteration budget before giving up on escape

    Returns:
        GreenValue; value 0 and escape_step None when the orbit did not escape
    """
    if n_max < 1:
        raise ValueError(f"n_max must be at least 1, got {n_max}")
    coefficients = _complex_coefficients(P)
    criterion = FloatEscapeCriterion(coefficients)
    d = criterion.degree
    lead = coefficients[0]
    ratios = [abs(c / lead) for c in coefficients[1:]]
    big = 10.0 ** (100.0 / d)

    z = complex(z)
    escape_step = None
    for n in range(n_max + 1):
        if criterion.escapes(z):
            escape_step = n
            break
        if n < n_max:
            z = _horner(coefficients, z)
    if escape_step is None:
        return GreenValue(value=0.0, error_bound=0.0, escape_step=None)

    def tail(w: complex) -> float:
        r = abs(w)
        return sum(ratio * r ** -(i + 1) for i, ratio in enumerate(ratios))

    n = escape_step
    s = tail(z)
    extra = 0
    while s > _TAIL_EPSILON and abs(z) < big and extra < _MAX_EXTRA_STEPS:
        z = _horner(coefficients, z)
        n += 1
        extra += 1
        s = tail(z)

    scale = float(d) ** -n
    log_z = math.log(abs(z))
    value = (log_z + math.log(abs(lead)) / (d - 1)) * scale
    error = (2.0 * s / (d - 1) + _ROUNDING * (1.0 + abs(log_z))) * scale
    return GreenValue(value=max(value, 0.0), error_bound=error, escape_step=escape_step)


def pca_coefficients(c: Sequence[complex], a: complex) -> list[complex]:
    """Complex coefficients (leading first) of P_{c,a}, whose derivative is z*prod(z - c_i)."""
    derivative = np.poly(np.array([0j] + [complex(ci) for ci in c]))
    integrated = np.polyint(derivative).astype(complex)
    integrated[-1] = complex(a) ** (len(c) + 2)
    return [complex(x) for x in integrated]


@lru_cache(maxsize=None)
def escape_box(d: int) -> EscapeBox:
    """
    Escape constants for P_{c,a} of degree d.

    C is the least power of two x >= 2 with
    x^d/(2d) >= sum_j binom(d-2, d-j) x^j / j + 1 + 2x, so that
    |z| > C max(1, |c|, |a|) forces |P(z)| >= 2|z|. theta bounds
    g(z) - log+ max(|z|, |c|, |a|) from above.
    """
    if d < 2:
        raise DegreeError(f"Degree must be at least 2, got {d}")

    def middle(x: float) -> float:
        return sum(math.comb(d - 2, d - j) * x**j / j for j in range(2, d))

    C = 2.0
    while C**d / (2 * d) < middle(C) + 1 + 2 * C:
        C *= 2
    theta = math.log(1.0 / d + middle(1.0) + 1.0) / (d - 1)
    return EscapeBox(C=C, theta=theta)


def crit_green_envelope_constant(d: int) -> float:
    """Bound on |G(P_{c,a}) - log+ max(|c|, |a|)| used for large parameters."""
    return max(escape_box(d).theta, math.log(8))


def escape_test_pca(c: Sequence[complex], a: complex, z: complex) -> bool:
    """True when z escapes under P_{c,a} by the explicit radius C*max(1, |c|, |a|)."""
    box = escape_box(len(c) + 2)
    radius = max([1.0, abs(complex(a))] + [abs(complex(ci)) for ci in c])
    return abs(complex(z)) > box.C * radius


def crit_green(c: Sequence[complex], a: complex, n_max: int = DEFAULT_N_MAX) -> float:
    """G(P_{c,a}): the largest Green value over the critical points 0, c_1, ..., c_{d-2}."""
    coefficients = pca_coefficients(c, a)
    values = [green_value(coefficients, point, n_max).value for point in [0j] + list(c)]
    result = max(values)
    logger.debug(f"G(P_c,a) = {result:.12g} for c={list(c)}, a={a}")
    return result
