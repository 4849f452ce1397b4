import cmath
import math

import pytest
from sympy.polys.domains import QQ

from polydyn.core.poly import Poly
from polydyn.core.rings import PARAM, PARAM_RING, T, AlgExtRing, param_degree
from polydyn.errors import DegreeError, TruncationError
from polydyn.services.bottcher import (
    HatPoly,
    bottcher_power,
    bottcher_series,
    evaluate_bottcher,
    verify_hat_functoriality,
)
from polydyn.services.green import green_value


def chebyshev_root(z: complex) -> complex:
    """The solution w of w + 1/w = z with |w| > 1."""
    w = (z + cmath.sqrt(z * z - 4)) / 2
    return w if abs(w) > 1 else 1 / w


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_functional_equation_holds_exactly(d, random_monic_centered):
    for _ in range(10):
        series = bottcher_series(random_monic_centered(d), 20)
        assert not any(series.functional_equation_residual())


def test_chebyshev_tail():
    series = bottcher_series(Poly.parse("2; 1, 0, -2"), 5)
    assert series.tail == (QQ(-1), QQ(0), QQ(-1), QQ(0), QQ(-2))


def test_first_tail_coefficient_of_quadratic_family():
    series = bottcher_series(Poly.parse("2; 1, 0, [0, 1]"), 2)
    assert series.coefficient(1) == T * QQ(1, 2)


def test_non_monic_rational_leading_coefficient():
    series = bottcher_series(Poly.parse("2; 2, 0, 1"), 6)
    assert series.alpha == 2
    assert not any(series.functional_equation_residual())


def test_irrational_alpha_extends_ring():
    series = bottcher_series(Poly.parse("3; 3, 0, 1, 1"), 6)
    assert isinstance(series.ring, AlgExtRing)
    assert not any(series.functional_equation_residual())


def test_uncentered_shift():
    series = bottcher_series(Poly.parse("2; 1, 4, 0"), 4)
    assert series.shift == 2
    assert series.linear_part() == Poly.parse("1; 1, 2")
    assert not any(series.functional_equation_residual())


def test_truncation_is_enforced():
    series = bottcher_series(Poly.parse("2; 1, 0, -2"), 3)
    with pytest.raises(TruncationError):
        series.coefficient(4)
    with pytest.raises(ValueError):
        series.coefficient(0)


def test_rejects_bad_arguments():
    with pytest.raises(DegreeError):
        bottcher_series(Poly.parse("1; 1, 1"), 3)
    with pytest.raises(ValueError):
        bottcher_series(Poly.parse("2; 1, 0, 0"), 0)


def test_hat_of_quadratic_family_is_the_family():
    family = Poly.parse("2; 1, 0, [0, 1]")
    assert bottcher_power(family, 2, 1).hat == family
    assert bottcher_power(family, 1, 1).hat == Poly.parse("1; 1, 0").change_ring(family.ring)


def test_hat_leading_coefficient():
    hat = bottcher_power(Poly.parse("2; 4, 0, 1"), 3, 2)
    assert hat.hat.degree == 3
    assert hat.hat.leading == 64
    assert hat.order == 2


@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_hat_functoriality(d, k, random_monic_centered):
    for _ in range(3):
        assert verify_hat_functoriality(random_monic_centered(d), k)


def test_functoriality_detects_a_wrong_hat():
    P = Poly.parse("2; 1, 0, -1")
    good = bottcher_power(P, 2, 1)
    bad = HatPoly(k=2, hat=good.hat + 1, tail=good.tail)
    assert not verify_hat_functoriality(P, 2, hat=bad)


def test_numeric_value_matches_closed_form():
    series = bottcher_series(Poly.parse("2; 1, 0, -2"), 20)
    assert abs(evaluate_bottcher(series, 5) - chebyshev_root(5)) < 1e-9


def test_log_modulus_is_green_function():
    P = Poly.parse("2; 1, 0, -2")
    series = bottcher_series(P, 20)
    phi = evaluate_bottcher(series, 6 + 1j)
    assert math.isclose(math.log(abs(phi)), green_value(P, 6 + 1j).value, abs_tol=1e-9)


def _with_symbolic_coefficient(P: Poly, i: int) -> Poly:
    """P with the coefficient a_i of z^(d-i) replaced by t."""
    d = int(P.degree)
    low = [PARAM.convert(c) for c in P.low_coefficients()]
    low[d - i] = T
    return Poly.from_low(PARAM, low)


def _tail_coefficients(P: Poly, order: int):
    """(k, j, alpha_{k,j}) for k + j <= order."""
    for k in range(1, order):
        hat = bottcher_power(P, k, order - k)
        for j in range(1, order - k + 1):
            yield k, j, hat.tail_coefficient(j)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_tail_weighted_degree(d, random_monic_centered):
    for i in range(2, d + 1):
        P = _with_symbolic_coefficient(random_monic_centered(d), i)
        for k, j, value in _tail_coefficients(P, 6):
            assert i * param_degree(value) <= k + j, (i, k, j)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_tail_denominators_divide_power_of_2d(d, random_monic_centered):
    for i in range(2, d + 1):
        P = _with_symbolic_coefficient(random_monic_centered(d, integral=True), i)
        for k, j, value in _tail_coefficients(P, 6):
            scale = (2 * d) ** (2 * (k + j - 1))
            assert all((scale * c).denominator == 1 for c in PARAM_RING(value).coeffs()), (i, k, j)


def test_tail_bounds_are_sharp_for_quadratic_family():
    # alpha_3 = t/4 - t^2/8 for z^2 + t
    value = bottcher_series(Poly.parse("2; 1, 0, [0, 1]"), 3).coefficient(3)
    assert 2 * param_degree(value) == 4
    assert value == T * QQ(1, 4) - T**2 * QQ(1, 8)
