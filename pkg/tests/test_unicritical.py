import numpy as np
import pytest
from sympy.polys.domains import QQ
from sympy.polys.rings import ring

from polydyn.errors import DegreeError
from polydyn.models import Membership, MembershipKind, MSetVerdict
from polydyn.services import unicritical
from polydyn.services.unicritical import (
    DIRECT,
    INVERSE,
    escape_time_grid,
    expected_capacity,
    grid_points,
    iterate_expansion_holds,
    marked_value,
    member_M,
    mobius,
    mset_lambda_test,
    pcf_count_periodic,
    pcf_count_preperiodic,
)


class TestCounts:
    @pytest.mark.parametrize("n,count", [(1, 0), (2, 1), (3, 3), (4, 6), (5, 15)])
    def test_quadratic_periodic(self, n, count):
        assert pcf_count_periodic(2, n).count == count

    def test_cubic_periodic(self):
        assert pcf_count_periodic(3, 2).count == 1
        assert pcf_count_periodic(3, 3).count == 4

    @pytest.mark.parametrize("d,k,n,count", [(2, 2, 1, 1), (2, 2, 2, 2), (3, 2, 1, 2)])
    def test_preperiodic(self, d, k, n, count):
        result = pcf_count_preperiodic(d, k, n)
        assert result.count == count
        assert result.k == k

    def test_preconditions(self):
        with pytest.raises(DegreeError):
            pcf_count_periodic(1, 2)
        with pytest.raises(ValueError):
            pcf_count_periodic(2, 0)
        with pytest.raises(ValueError):
            pcf_count_preperiodic(2, 1, 1)

    @pytest.mark.parametrize("d", [2, 3])
    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_periodic_count_matches_polynomial_degrees(self, d, n):
        # Q_n(c) = P_c^n(0) for P_c = c z^d + 1; new roots of Q_n are the exact period n parameters
        R, c = ring("c", QQ)

        def q(m):
            value = R.zero
            for _ in range(m):
                value = c * value**d + 1
            return value

        earlier = R.one
        for m in range(1, n):
            if n % m == 0:
                earlier = earlier.lcm(q(m))
        assert pcf_count_periodic(d, n).count == q(n).degree() - earlier.degree()

    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    def test_counts_are_positive(self, d):
        for n in range(1, 11):
            if n >= 2:
                assert pcf_count_periodic(d, n).count > 0, n
            for k in range(2, 7):
                assert pcf_count_preperiodic(d, k, n).count > 0, (k, n)

    def test_mobius(self):
        assert [mobius(n) for n in range(1, 11)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]

    @pytest.mark.parametrize("d", [2, 3, 4])
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_iterate_expansion(self, d, n):
        assert iterate_expansion_holds(d, n)


class TestMembership:
    def test_escaping_parameter(self):
        result = member_M(2, [0], 1)
        assert result.kind == MembershipKind.OUT
        assert result.escape_step == 2

    @pytest.mark.parametrize("t", [-2, -1, 0, 0.25, 1j])
    def test_bounded_critical_orbits(self, t):
        assert member_M(2, [0], t).kind == MembershipKind.IN

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_small_disk_lies_in_connectedness_locus(self, d, rng):
        radii = 0.25 * rng.random(200)
        angles = 2 * np.pi * rng.random(200)
        for t in radii * np.exp(1j * angles):
            t = complex(t)
            assert member_M(d, [0], t, 500).kind == MembershipKind.IN
            z = 0j
            for _ in range(500):
                z = z**d + t
                assert abs(z) <= 0.5

    def test_marked_parameter(self):
        assert marked_value([1, QQ(1, 2)], 2) == 2
        result = member_M(2, [0, 1], 1)
        assert result.kind == MembershipKind.OUT
        assert result.escape_step == 1

    def test_grid_agrees_with_pointwise(self):
        ts = np.array([-2.5, -1, 0, 1j, 0.5 + 0.5j, 2 + 2j, -0.1 + 0.1j, 1, 0.3, -2 - 1j])
        steps = escape_time_grid(2, [0], ts, 200)
        for t, step in zip(ts, steps):
            result = member_M(2, [0], t, 200)
            if step < 0:
                assert result.kind == MembershipKind.IN
            else:
                assert result.escape_step == step

    def test_grid_points(self):
        ts = grid_points(4, 2.0)
        assert ts.shape == (4, 4)
        assert ts[0, 0] == -1.5 - 1.5j
        assert ts[3, 0] == 1.5 - 1.5j
        assert ts[0, 3] == -1.5 + 1.5j

    def test_expected_capacity(self):
        assert expected_capacity([0]) == 1.0
        assert expected_capacity([0, 2]) == pytest.approx(0.5)
        assert expected_capacity([0, 0, 4]) == pytest.approx(0.5)
        assert expected_capacity([1, QQ(1, 2), 0]) == pytest.approx(2.0)


class TestMSetSampler:
    def test_root_of_unity(self):
        report = mset_lambda_test(2, -1)
        assert report.verdict == MSetVerdict.IN_M
        assert report.shortcut is not None
        assert not report.heuristic

    @pytest.mark.parametrize("lam,convention", [(8, INVERSE), (0.125, DIRECT), (-10j, INVERSE)])
    def test_small_disk_shortcut(self, lam, convention):
        report = mset_lambda_test(2, lam, convention=convention)
        assert report.verdict == MSetVerdict.IN_M
        assert report.shortcut == "M_lambda inside D(0,1/4)"

    def _assert_certified(self, report, d, scale, budget):
        witness = report.witness
        assert member_M(d, [0], witness.t, budget).kind == MembershipKind.OUT
        if witness.kind == "membership":
            assert member_M(d, [0, scale], witness.t, budget).kind == MembershipKind.IN
        else:
            assert witness.kind == "green"
            details = witness.details
            assert details["g_marked"] + details["error_bound"] < d * (
                details["g_critical"] - details["error_bound"]
            )

    def test_three_halves_small_grid(self):
        report = mset_lambda_test(2, 1.5, grid=64, budget=200)
        assert report.verdict == MSetVerdict.NOT_IN_M
        assert report.samples == 64 * 64
        assert report.expected_capacity == pytest.approx(1.5)
        self._assert_certified(report, 2, QQ(2, 3), 200)

    def test_three_halves_full_density(self):
        report = mset_lambda_test(2, 1.5, grid=256, budget=2000)
        assert report.verdict == MSetVerdict.NOT_IN_M
        assert report.samples == 256 * 256
        assert report.witness.kind in ("membership", "green")
        self._assert_certified(report, 2, QQ(2, 3), 2000)

    def test_membership_witness_preferred(self, monkeypatch):
        # every sampled t looks like a point of M_lambda outside M(2, 0)
        def fake_steps(d, z, ts, budget):
            return np.where(np.all(z == 0), 1, -1) * np.ones(ts.shape, dtype=np.int64)

        def fake_membership(d, z, t, budget):
            if z == 0:
                return Membership(MembershipKind.OUT, escape_step=1)
            return Membership(MembershipKind.IN)

        monkeypatch.setattr(unicritical, "_escape_steps", fake_steps)
        monkeypatch.setattr(unicritical, "_membership_from", fake_membership)
        report = mset_lambda_test(2, 1.5, grid=4, budget=10)
        assert report.verdict == MSetVerdict.NOT_IN_M
        assert report.witness.kind == "membership"
        assert report.witness.grid_index == (0, 0)
        assert report.membership_candidates == 16

    def test_preconditions(self):
        with pytest.raises(ValueError):
            mset_lambda_test(2, 0)
        with pytest.raises(ValueError):
            mset_lambda_test(2, 2, convention="sideways")
        with pytest.raises(DegreeError):
            mset_lambda_test(1, 2)
