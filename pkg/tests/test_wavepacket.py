"""Tests for Gaussian wave-packet evolution and the quadrature oracle."""

import math

import numpy as np
import pytest
from scipy import integrate

from damped_kernel.classical.core import DampedParams
from damped_kernel.wavepacket.packet import (
    GaussianPacket,
    evolve_analytic,
    initial_slope,
    mean_position,
    mean_velocity,
    mean_velocity_derivative,
    theta1_discrepancy,
    theta1_printed,
    velocity_zero_crossing,
)
from damped_kernel.wavepacket.quadrature import (
    QuadratureGrid,
    UnderResolvedGridError,
    evolve_quadrature,
    relative_l2,
)


@pytest.fixture
def packet():
    """Normalized packet θ₀ = 1/2, v₀ = 5."""
    return GaussianPacket.normalized(0.5, 5.0)


class TestGaussianPacket:
    """Tests for the initial packet."""

    def test_normalization(self, packet):
        q = np.linspace(-10.0, 10.0, 4001)
        density = np.abs(packet.wavefunction(q)) ** 2
        assert integrate.simpson(density, x=q) == pytest.approx(1.0, rel=1e-10)

    def test_envelope_width(self, packet):
        assert packet.envelope_width() == pytest.approx(1.0)

    def test_invalid_width(self):
        with pytest.raises(ValueError):
            GaussianPacket.normalized(-0.5, 1.0)
        with pytest.raises(ValueError):
            GaussianPacket(theta=0.0, v0=1.0)

    def test_off_centre_packet_rejected(self):
        with pytest.raises(ValueError):
            GaussianPacket(theta=0.5, v0=1.0, center=1.0)


class TestAnalyticEvolution:
    """Tests for completed-square evolution."""

    def test_reference_observables(self, standard_params):
        """⟨x⟩ and ⟨v⟩ at T = 1 in the reference regime (κ = 0.6, v₀ = 5)."""
        assert mean_position(1.0, standard_params, 5.0) == pytest.approx(4.4754130583, abs=1e-9)
        assert mean_velocity(1.0, standard_params, 5.0) == pytest.approx(1.5325056031, abs=1e-9)
        assert mean_velocity(1.0, standard_params, 5.0) == pytest.approx(1.53251, abs=5e-6)

    def test_mean_position_from_evolution(self, packet, standard_params):
        for T in (0.3, 1.0, 2.5):
            evolved = evolve_analytic(packet, T, standard_params)
            assert evolved.mean_x == pytest.approx(mean_position(T, standard_params, 5.0), rel=1e-13)

    def test_norm_decays_as_sech(self, packet, standard_params):
        for T in (0.5, 1.0, 3.0):
            evolved = evolve_analytic(packet, T, standard_params)
            assert evolved.norm == pytest.approx(1.0 / math.cosh(0.6 * T), rel=1e-12)

    def test_free_packet_keeps_its_norm(self, packet, free_params):
        evolved = evolve_analytic(packet, 2.0, free_params)
        assert evolved.norm == pytest.approx(1.0, rel=1e-12)
        assert evolved.mean_x == pytest.approx(10.0, rel=1e-14)

    def test_free_spreading(self, free_params):
        """Free width grows as θ₁ = θ₀/(1 + 2iθ₀T)."""
        evolved = evolve_analytic(GaussianPacket.normalized(0.5, 0.0), 2.0, free_params)
        assert evolved.gaussian_coefficient == pytest.approx(0.5 / (1.0 + 2.0j), rel=1e-12)

    def test_short_time_coefficient_tends_to_theta0(self, packet, standard_params):
        evolved = evolve_analytic(packet, 1e-6, standard_params)
        assert evolved.gaussian_coefficient == pytest.approx(0.5, abs=1e-4)

    def test_density_integrates_to_norm(self, packet, standard_params):
        evolved = evolve_analytic(packet, 1.0, standard_params)
        x = np.linspace(evolved.mean_x - 15.0, evolved.mean_x + 15.0, 6001)
        assert integrate.simpson(evolved.density(x), x=x) == pytest.approx(evolved.norm, rel=1e-8)

    def test_non_positive_duration(self, packet, standard_params):
        with pytest.raises(ValueError):
            evolve_analytic(packet, 0.0, standard_params)

    def test_derivative_and_slope(self, standard_params):
        assert mean_velocity_derivative(0.0, standard_params, 5.0) == 5.0
        assert mean_velocity_derivative(1.0, standard_params, 5.0) == pytest.approx(
            5.0 / math.cosh(0.6) ** 2, rel=1e-14)
        assert initial_slope(standard_params, 5.0) == pytest.approx(5.0, rel=1e-6)

    def test_printed_velocity_is_not_the_derivative(self, standard_params):
        assert abs(mean_velocity(1.0, standard_params, 5.0)
                   - mean_velocity_derivative(1.0, standard_params, 5.0)) > 1.0

    def test_free_velocity_is_constant(self, free_params):
        assert mean_velocity(3.0, free_params, 5.0) == 5.0

    def test_negative_time(self, standard_params):
        with pytest.raises(ValueError):
            mean_position(-1.0, standard_params, 5.0)
        with pytest.raises(ValueError):
            mean_velocity(-1.0, standard_params, 5.0)


class TestVelocityZero:
    """Tests for the sign change of the printed mean velocity."""

    def test_zero_crossing(self, standard_params):
        root = velocity_zero_crossing(standard_params)
        assert root == pytest.approx(math.log(1.0 + math.sqrt(2.0)) / 0.6, abs=1e-10)
        assert root == pytest.approx(1.4689560, abs=1e-6)
        assert mean_velocity(root - 1e-3, standard_params, 5.0) > 0.0
        assert mean_velocity(root + 1e-3, standard_params, 5.0) < 0.0

    def test_scales_with_kappa(self):
        root = velocity_zero_crossing(DampedParams(kappa=1.2))
        assert root == pytest.approx(math.log(1.0 + math.sqrt(2.0)) / 1.2, abs=1e-10)

    def test_free_packet_has_no_zero(self, free_params):
        with pytest.raises(ValueError):
            velocity_zero_crossing(free_params)


class TestPrintedWidth:
    """Tests for the width coefficient in its printed form."""

    def test_discrepancy_is_the_reciprocal_factor(self, standard_params):
        """Printed and completed-square θ₁ differ by the factor tanh⁴(κT)/κ⁴."""
        expected = 1.0 - (math.tanh(0.6) / 0.6) ** 4
        assert theta1_discrepancy(1.0, standard_params) == pytest.approx(expected, rel=1e-9)

    def test_printed_width_value(self, standard_params):
        analytic = evolve_analytic(GaussianPacket.normalized(0.5, 0.0), 1.0, standard_params).theta1
        printed = theta1_printed(1.0, standard_params)
        assert printed == pytest.approx(analytic * (math.tanh(0.6) / 0.6) ** 4, rel=1e-9)

    def test_printed_width_ratio_away_from_unit_time(self, standard_params):
        """At T = 2 the ratio is tanh⁴(κT)/κ⁴, not tanh⁴(κT)/(κT)⁴."""
        analytic = evolve_analytic(GaussianPacket.normalized(0.5, 0.0), 2.0, standard_params).theta1
        printed = theta1_printed(2.0, standard_params)
        assert printed / analytic == pytest.approx(math.tanh(1.2) ** 4 / 0.6 ** 4, rel=1e-9)

    def test_invalid_alpha0(self, standard_params):
        with pytest.raises(ValueError):
            theta1_printed(1.0, standard_params, alpha0=-0.5)
        with pytest.raises(ValueError):
            theta1_printed(0.0, standard_params)


class TestQuadratureOracle:
    """Tests for direct quadrature of the closed kernel."""

    @pytest.mark.parametrize("T", [0.5, 1.0])
    def test_agrees_with_analytic_packet(self, packet, standard_params, T):
        sampled = evolve_quadrature(packet, T, standard_params)
        analytic = evolve_analytic(packet, T, standard_params)
        assert relative_l2(sampled, analytic.wavefunction(sampled.x)) < 1e-6
        assert sampled.norm() == pytest.approx(analytic.norm, rel=1e-6)

    def test_gaussian_fit(self, packet, standard_params):
        sampled = evolve_quadrature(packet, 1.0, standard_params)
        analytic = evolve_analytic(packet, 1.0, standard_params)
        fit = sampled.gaussian_fit()
        assert fit.residual < 1e-6
        assert fit.center == pytest.approx(analytic.mean_x, abs=1e-6)
        assert fit.gaussian_coefficient == pytest.approx(analytic.gaussian_coefficient, rel=1e-5)

    def test_coarse_grid_is_refused(self, packet, standard_params):
        auto = QuadratureGrid.for_packet(packet, 1.0, standard_params)
        coarse = QuadratureGrid(
            q_half_width=auto.q_half_width, panels=1, x_min=auto.x_min, x_max=auto.x_max,
        )
        with pytest.raises(UnderResolvedGridError) as excinfo:
            evolve_quadrature(packet, 1.0, standard_params, grid=coarse)
        assert excinfo.value.phase_step > math.pi / 4.0
        assert excinfo.value.required_panels > 1

    def test_auto_grid_meets_target(self, packet, standard_params):
        grid = QuadratureGrid.for_packet(packet, 1.0, standard_params)
        assert grid.validate(packet, 1.0, standard_params) <= math.pi / 8.0 + 1e-12
        assert grid.n_x >= 401

    def test_nodes_and_weights(self):
        grid = QuadratureGrid(q_half_width=4.0, panels=3, x_min=-1.0, x_max=1.0, order=10)
        q, w = grid.nodes()
        assert q.size == w.size == 30
        assert np.sum(w) == pytest.approx(8.0, rel=1e-14)
        assert np.all(np.diff(q) > 0.0)
        assert q.min() > -4.0 and q.max() < 4.0
        # exact for polynomials of degree < 2·order
        assert np.sum(w * q ** 4) == pytest.approx(2.0 * 4.0 ** 5 / 5.0, rel=1e-13)

    def test_invalid_grid(self):
        with pytest.raises(ValueError):
            QuadratureGrid(q_half_width=0.0, panels=1, x_min=0.0, x_max=1.0)
        with pytest.raises(ValueError):
            QuadratureGrid(q_half_width=1.0, panels=1, x_min=1.0, x_max=0.0)
