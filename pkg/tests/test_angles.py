import pytest
from sympy.polys.domains import QQ

from polydyn.errors import DegreeError, PortraitError
from polydyn.models import Angle, EquivalenceKind, Portrait
from polydyn.services.angles import (
    build_portrait,
    circle_distance,
    format_portrait,
    md_orbit,
    md_orbit_by_simulation,
    periodic_angle,
    theta_equivalent,
    unlinked,
    validate_portrait,
)


def A(p: int, q: int = 1) -> Angle:
    return Angle.of(p, q)


class TestMultiplication:
    @pytest.mark.parametrize(
        "angle,d,expected",
        [
            (A(1, 6), 3, (1, 1)),
            (A(1, 4), 2, (2, 1)),
            (A(1, 36), 3, (2, 2)),
            (A(1, 8), 4, (2, 1)),
            (A(3, 10), 3, (0, 4)),
            (A(0), 5, (0, 1)),
        ],
    )
    def test_known_orbits(self, angle, d, expected):
        assert md_orbit(angle, d) == expected

    @pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
    def test_formula_agrees_with_simulation(self, d):
        for q in range(1, 31):
            for p in range(q):
                assert md_orbit(A(p, q), d) == md_orbit_by_simulation(A(p, q), d)

    def test_degree_one_is_rejected(self):
        with pytest.raises(DegreeError):
            md_orbit(A(1, 3), 1)

    def test_angles_are_reduced_mod_one(self):
        assert A(5, 4) == A(1, 4)
        assert Angle(QQ(-1, 4)) == A(3, 4)
        assert str(A(6, 8)) == "3/4"

    def test_circle_distance(self):
        assert circle_distance(A(1, 10), A(9, 10)) == QQ(1, 5)
        assert circle_distance(A(1, 4), A(3, 4)) == QQ(1, 2)


class TestPeriodicAngle:
    @pytest.mark.parametrize(
        "d,n,expected", [(3, 2, A(1, 4)), (3, 4, A(3, 10)), (4, 2, A(2, 15)), (3, 5, A(27, 121))]
    )
    def test_values(self, d, n, expected):
        angle = periodic_angle(d, n)
        assert angle == expected
        assert md_orbit(angle, d) == (0, n)

    def test_preconditions(self):
        with pytest.raises(DegreeError):
            periodic_angle(2, 3)
        with pytest.raises(ValueError):
            periodic_angle(3, 1)


class TestLinking:
    def test_unlinked_sets(self):
        assert unlinked({A(0), A(1, 3)}, {A(1, 2), A(2, 3)})

    def test_linked_sets(self):
        assert not unlinked({A(0), A(1, 3)}, {A(1, 6), A(1, 2)})

    def test_sets_must_be_disjoint(self):
        with pytest.raises(ValueError):
            unlinked({A(0), A(1, 3)}, {A(1, 3)})


class TestPortraits:
    def test_cubic_single_set(self):
        portrait = build_portrait(3, [2], [3])
        assert portrait.sets == ((A(1, 36), A(13, 36), A(25, 36)),)
        assert validate_portrait(portrait) == []
        assert format_portrait(portrait) == "{1/36, 13/36, 25/36}"

    def test_quartic_two_sets(self):
        portrait = build_portrait(4, [2, 3], [2, 3])
        assert [len(theta) for theta in portrait.sets] == [2, 3]
        assert portrait.sets[0][0] == A(1, 120)
        assert validate_portrait(portrait) == []
        assert md_orbit(portrait.sets[0][1], 4) == (2, 2)

    def test_validation_flags_linked_sets(self):
        portrait = Portrait(degree=3, sets=((A(0), A(1, 3)), (A(1, 6), A(1, 2))))
        assert validate_portrait(portrait) == ["CP3"]

    def test_validation_flags_bad_images(self):
        portrait = Portrait(degree=3, sets=((A(0), A(1, 4), A(1, 2)),))
        assert "CP1" in validate_portrait(portrait)

    @pytest.mark.parametrize(
        "periods,sizes,condition",
        [
            ([2], [1, 3], "Shape"),
            ([2], [1], "CP1"),
            ([2], [2], "CP2"),
            ([2, 2], [2, 2], "Periods"),
            ([1, 2], [2, 2], "Periods"),
        ],
    )
    def test_rejected_requests(self, periods, sizes, condition):
        with pytest.raises(PortraitError) as excinfo:
            build_portrait(3, periods, sizes)
        assert excinfo.value.condition == condition

    def test_quadratic_is_rejected(self):
        with pytest.raises(DegreeError):
            build_portrait(2, [2], [2])


class TestThetaEquivalence:
    @pytest.fixture
    def portrait(self):
        return build_portrait(3, [2], [3])

    def test_separated_at_once(self, portrait):
        result = theta_equivalent(A(1, 6), A(1, 2), portrait, depth=10)
        assert result.kind == EquivalenceKind.SEPARATED
        assert result.step == 0

    def test_identical_angles(self, portrait):
        assert theta_equivalent(A(1, 2), A(1, 2), portrait, 0).kind == EquivalenceKind.EQUIVALENT

    def test_shallow_search_is_undecided(self, portrait):
        result = theta_equivalent(A(0), A(1, 72), portrait, depth=0)
        assert result.kind == EquivalenceKind.UNDECIDED

    def test_full_horizon_decides(self, portrait):
        result = theta_equivalent(A(0), A(1, 72), portrait, depth=50)
        assert result.kind != EquivalenceKind.UNDECIDED
