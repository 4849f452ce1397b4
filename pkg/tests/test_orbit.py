import pytest
from sympy.polys.domains import QQ

from polydyn.core.escape import EscapeCriterion, FloatEscapeCriterion
from polydyn.core.orbit import iterate_orbit, iterate_orbit_at_roots
from polydyn.core.poly import Poly
from polydyn.core.rings import T
from polydyn.errors import RingMismatchError
from polydyn.models import OrbitKind


def test_periodic_critical_point():
    record = iterate_orbit(Poly.parse("2; 1, 0, -1"), 0)
    assert record.kind == OrbitKind.PREPERIODIC
    assert (record.tail, record.cycle) == (0, 2)
    assert record.cycle_values == [QQ(0), QQ(-1)]


def test_strictly_preperiodic_critical_point():
    record = iterate_orbit(Poly.parse("2; 1, 0, -2"), 0)
    assert record.is_preperiodic
    assert (record.tail, record.cycle) == (2, 1)
    assert record.orbit == [QQ(0), QQ(-2), QQ(2)]


def test_escaping_point():
    record = iterate_orbit(Poly.parse("2; 1, 0, 1"), 0)
    assert record.kind == OrbitKind.ESCAPING
    assert record.escape_step == 2


def test_step_cap_gives_unknown():
    record = iterate_orbit(Poly.parse("2; 1, 0, -1"), QQ(1, 2), max_steps=3)
    assert record.kind == OrbitKind.UNKNOWN
    assert record.reason == "max_steps"


def test_bit_cap_gives_unknown():
    record = iterate_orbit(Poly.parse("2; 1, 0, -1"), QQ(1, 3), max_bits=40)
    assert record.kind == OrbitKind.UNKNOWN
    assert record.reason == "max_bits"


def test_escape_criterion_is_forward_invariant():
    P = Poly.parse("3; 2, -1, 0, 5")
    criterion = EscapeCriterion(P)
    z = QQ(10)
    assert criterion.escapes(z)
    for _ in range(3):
        z = P(z)
        assert criterion.escapes(z)


def test_float_criterion_agrees_on_unicritical():
    criterion = FloatEscapeCriterion([1, 0, -2])
    assert not criterion.escapes(2.0)
    assert criterion.escapes(2.5)


def test_parameter_polynomial_has_no_exact_criterion():
    with pytest.raises(RingMismatchError):
        EscapeCriterion(Poly.parse("2; 1, 0, [0, 1]"))


def test_zero_step_budget_is_rejected():
    with pytest.raises(ValueError):
        iterate_orbit(Poly.parse("2; 1, 0, 0"), 0, max_steps=0)


def test_orbit_at_rational_root_matches_rational_orbit():
    record = iterate_orbit_at_roots(Poly.parse("2; 1, 0, [0, 1]"), 0, T + 2)
    assert record.is_preperiodic
    assert (record.tail, record.cycle) == (2, 1)
    assert record.orbit == [0, -2, 2]


def test_orbit_at_roots_of_period_three_cubic():
    record = iterate_orbit_at_roots(Poly.parse("2; 1, 0, [0, 1]"), 0, T**3 + 2 * T**2 + T + 1)
    assert (record.tail, record.cycle) == (0, 3)
    assert record.orbit == [0, T, T**2 + T]


def test_orbit_at_roots_step_cap():
    # t = 1/2 is outside the connectedness locus; the orbit of 0 grows
    record = iterate_orbit_at_roots(Poly.parse("2; 1, 0, [0, 1]"), 0, 2 * T - 1, max_steps=5)
    assert record.kind == OrbitKind.UNKNOWN
    assert record.reason == "max_steps"


def test_orbit_at_roots_rejects_constant_modulus():
    with pytest.raises(ValueError):
        iterate_orbit_at_roots(Poly.parse("2; 1, 0, [0, 1]"), 0, 3)
    with pytest.raises(ValueError):
        iterate_orbit_at_roots(Poly.parse("2; 1, 0, [0, 1]"), 0, T, max_steps=0)
