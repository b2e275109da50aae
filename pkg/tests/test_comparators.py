"""Tests for the competing quantization schemes."""

import math

import pytest

from damped_kernel.comparators.methods import (
    MethodId,
    asymptote,
    max_velocity_gap,
    observables,
    reliability_interval,
    velocity_zero,
)
from damped_kernel.wavepacket.packet import mean_position, mean_velocity


class TestObservables:
    """Tests for ⟨x⟩, ⟨v⟩ and θ₁ of each method."""

    def test_initial_values(self, standard_params):
        for m in MethodId:
            obs = observables(m, 0.0, standard_params, 5.0)
            assert obs.mean_x == 0.0
            assert obs.mean_v == pytest.approx(5.0)
            assert obs.theta1 is None

    def test_lg_uses_packet_formulas(self, standard_params):
        obs = observables(MethodId.LG, 1.0, standard_params, 5.0)
        assert obs.mean_x == mean_position(1.0, standard_params, 5.0)
        assert obs.mean_v == mean_velocity(1.0, standard_params, 5.0)
        assert obs.theta1 is not None

    def test_kochan(self, standard_params):
        obs = observables(MethodId.KOCHAN, 1.0, standard_params, 5.0)
        expected_x = 2.0 * 5.0 * math.tanh(0.3) / 0.6
        assert obs.mean_x == pytest.approx(expected_x, rel=1e-13)
        expected_v = 10.0 / (1.0 + math.exp(-0.6)) - 0.9 * expected_x
        assert obs.mean_v == pytest.approx(expected_v, rel=1e-12)

    def test_caldirola_kanai(self, standard_params):
        obs = observables(MethodId.CK, 2.0, standard_params, 5.0)
        assert obs.mean_x == pytest.approx(5.0 * (1.0 - math.exp(-1.2)) / 0.6, rel=1e-13)
        assert obs.mean_v == 5.0

    def test_dgst_shares_ck_position_and_width(self, standard_params):
        ck = observables(MethodId.CK, 2.0, standard_params, 5.0)
        dgst = observables(MethodId.DGST, 2.0, standard_params, 5.0)
        assert dgst.mean_x == ck.mean_x
        assert dgst.theta1 == ck.theta1
        assert dgst.mean_v == pytest.approx(5.0 * math.exp(1.2), rel=1e-14)

    def test_ck_width(self, standard_params):
        obs = observables(MethodId.CK, 1.0, standard_params, 5.0, alpha0=0.5)
        ratio = 0.6 / (1.0 - math.exp(-0.6))
        expected = (ratio ** 2 / 4.0) / (0.5 - 0.5j * ratio)
        assert obs.theta1 == pytest.approx(expected, rel=1e-12)

    def test_string_method_ids(self, standard_params):
        assert observables("CK", 1.0, standard_params, 5.0) == observables(
            MethodId.CK, 1.0, standard_params, 5.0)

    def test_negative_time(self, standard_params):
        with pytest.raises(ValueError):
            observables(MethodId.LG, -0.5, standard_params, 5.0)


class TestLongTimeBehaviour:
    """Tests for asymptotes, reliability intervals and velocity zeros."""

    def test_asymptotes(self, standard_params):
        assert asymptote(MethodId.KOCHAN, standard_params, 5.0) == pytest.approx(2.0 * 5.0 / 0.6)
        for m in (MethodId.LG, MethodId.CK, MethodId.DGST):
            assert asymptote(m, standard_params, 5.0) == pytest.approx(5.0 / 0.6)

    def test_positions_reach_asymptotes(self, standard_params):
        for m in MethodId:
            late = observables(m, 40.0, standard_params, 5.0).mean_x
            assert late == pytest.approx(asymptote(m, standard_params, 5.0), rel=1e-4)

    def test_reliability_intervals(self, standard_params):
        assert reliability_interval(MethodId.LG, standard_params) == pytest.approx(
            (0.0, math.log(1.0 + math.sqrt(2.0)) / 0.6))
        assert reliability_interval(MethodId.KOCHAN, standard_params) == pytest.approx(
            (0.0, math.log(3.0) / 0.6))
        assert reliability_interval(MethodId.CK, standard_params) == (0.0, math.inf)

    def test_velocity_zeros(self, standard_params):
        assert velocity_zero(MethodId.LG, standard_params) == pytest.approx(1.4689560, abs=1e-6)
        assert velocity_zero(MethodId.KOCHAN, standard_params) == pytest.approx(
            math.log(3.0) / 0.6, abs=1e-10)
        assert velocity_zero(MethodId.CK, standard_params) is None
        assert velocity_zero(MethodId.DGST, standard_params) is None

    def test_free_particle_has_no_intervals(self, free_params):
        with pytest.raises(ValueError):
            reliability_interval(MethodId.LG, free_params)
        with pytest.raises(ValueError):
            asymptote(MethodId.CK, free_params, 5.0)

    def test_initial_slopes_agree(self, standard_params):
        h = 1e-6
        for m in MethodId:
            slope = observables(m, h, standard_params, 5.0).mean_x / h
            assert slope == pytest.approx(5.0, rel=1e-6)

    def test_lg_and_kochan_velocities_are_close_early(self, standard_params):
        """The two schemes track each other inside the LG reliability interval."""
        times = [0.1 * k for k in range(15)]
        gap = max_velocity_gap(standard_params, 5.0, times)
        assert 0.0 < gap < 5.0
        assert max_velocity_gap(standard_params, 5.0, []) == 0.0


class TestLargeDampingTimes:
    """κT beyond the float range of e^{κT} (~710)."""

    T_LATE = 2000.0

    def test_every_method_evaluates(self, standard_params):
        for m in MethodId:
            obs = observables(m, self.T_LATE, standard_params, 5.0)
            assert obs.mean_x == pytest.approx(asymptote(m, standard_params, 5.0), rel=1e-12)
            assert math.isfinite(abs(obs.theta1))

    def test_velocities(self, standard_params):
        kochan = observables(MethodId.KOCHAN, self.T_LATE, standard_params, 5.0)
        assert kochan.mean_v == pytest.approx(10.0 - 0.9 * 2.0 * 5.0 / 0.6, rel=1e-12)
        assert observables(MethodId.CK, self.T_LATE, standard_params, 5.0).mean_v == 5.0
        assert math.isfinite(observables(MethodId.LG, self.T_LATE, standard_params, 5.0).mean_v)

    def test_dgst_velocity_saturates(self, standard_params):
        assert observables(MethodId.DGST, self.T_LATE, standard_params, 5.0).mean_v == math.inf
        assert observables(MethodId.DGST, self.T_LATE, standard_params, -5.0).mean_v == -math.inf
        assert observables(MethodId.DGST, self.T_LATE, standard_params, 0.0).mean_v == 0.0

    def test_kochan_width_matches_moderate_times(self, standard_params):
        """The rewritten κ/(1 - e^{κT}) agrees with the direct form where both work."""
        obs = observables(MethodId.KOCHAN, 2.0, standard_params, 5.0, alpha0=0.5)
        k_over_tanh = 0.6 / math.tanh(0.6)
        k_over_growth = 0.6 / (1.0 - math.exp(1.2))
        expected = (k_over_tanh ** 2 / 16.0) / (
            0.5 - 1j * (3.0 - math.exp(-1.2)) * k_over_growth / 4.0)
        assert obs.theta1 == pytest.approx(expected, rel=1e-13)

    def test_velocity_gap_over_long_grid(self, standard_params):
        gap = max_velocity_gap(standard_params, 5.0, [0.0, 1.0, 100.0, self.T_LATE])
        assert math.isfinite(gap)
