import cmath
import math

import pytest

from polydyn.core.poly import Poly
from polydyn.errors import DegreeError
from polydyn.services.green import (
    crit_green,
    crit_green_envelope_constant,
    escape_box,
    escape_test_pca,
    green_value,
    pca_coefficients,
)

CHEBYSHEV = Poly.parse("2; 1, 0, -2")


def chebyshev_green(z: complex) -> float:
    w = (z + cmath.sqrt(z * z - 4)) / 2
    return abs(math.log(abs(w)))


@pytest.mark.parametrize("z", [3, 4, 5 + 1j])
def test_matches_closed_form(z):
    result = green_value(CHEBYSHEV, z)
    assert result.escaped
    assert abs(result.value - chebyshev_green(z)) <= 1e-9
    assert result.error_bound < 1e-9


@pytest.mark.parametrize("z", [3, 0.5 + 2.5j, -7j])
def test_functional_equation(z):
    P = Poly.parse("2; 1, 0, 1")
    image = complex(z) ** 2 + 1
    assert math.isclose(green_value(P, image).value, 2 * green_value(P, z).value, abs_tol=1e-9)


def test_bounded_orbit_has_zero_value():
    result = green_value(Poly.parse("2; 1, 0, -1"), 0)
    assert result.value == 0.0
    assert not result.escaped


def test_leading_coefficient_enters_value():
    # g for a z^2 is g for z^2 evaluated at a z
    scaled = green_value([3, 0, 0], 5).value
    assert math.isclose(scaled, math.log(15), abs_tol=1e-9)


def test_escape_box_constants():
    assert escape_box(2).C == 16
    assert escape_box(3).C == 8
    with pytest.raises(DegreeError):
        escape_box(1)


def test_escape_test_pca():
    assert escape_test_pca([], 0, 17)
    assert not escape_test_pca([], 0, 15)
    assert escape_test_pca([], 3, 49)
    assert not escape_test_pca([], 3, 47)


def test_pca_coefficients():
    assert pca_coefficients([1], 2) == [1 / 3, -1 / 2, 0, 8]


def test_crit_green():
    assert crit_green([], 0) == 0.0
    assert crit_green([], 2) > 0.0


def test_rejects_empty_budget():
    with pytest.raises(ValueError):
        green_value(CHEBYSHEV, 3, n_max=0)


def _random_complex(rng, scale: float) -> complex:
    x, y = rng.uniform(-scale, scale, 2)
    return complex(x, y)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_green_growth_envelope(rng, d):
    theta = escape_box(d).theta
    for _ in range(100):
        scale = 10 ** rng.uniform(-1, 2)
        c = [_random_complex(rng, scale) for _ in range(d - 2)]
        a = _random_complex(rng, scale)
        z = _random_complex(rng, 10 ** rng.uniform(-1, 2))
        result = green_value(pca_coefficients(c, a), z)
        radius = max([1.0, abs(z), abs(a)] + [abs(ci) for ci in c])
        assert result.value <= math.log(radius) + theta + result.error_bound + 1e-9


@pytest.mark.parametrize("d", [2, 3, 4])
def test_crit_green_growth_envelope(rng, d):
    bound = crit_green_envelope_constant(d)
    assert bound >= escape_box(d).theta
    for _ in range(50):
        c = [_random_complex(rng, 1.0) for _ in range(d - 2)]
        a = _random_complex(rng, 1.0)
        size = max([abs(a)] + [abs(ci) for ci in c])
        factor = 10 ** rng.uniform(1, 3) / size
        c = [ci * factor for ci in c]
        a *= factor
        size *= factor
        assert abs(crit_green(c, a) - math.log(size)) <= bound
