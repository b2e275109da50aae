"""Tests for the hyperbolic helpers and convergence tools."""

import math

import numpy as np
import pytest

from damped_kernel.numerics import hyperbolic
from damped_kernel.numerics.convergence import fit_order, relative_error, richardson_extrapolate
from damped_kernel.numerics.hyperbolic import (
    coth,
    expm1_neg,
    sinh_ratio,
    tanh_over_x,
    x_coth_x,
    x_csch_x,
    x_minus_tanh_x,
)


class TestHyperbolicHelpers:
    """Tests for overflow- and cancellation-safe hyperbolic functions."""

    @pytest.mark.parametrize("u", [1e-3, 0.1, 0.6, 2.0, 15.0])
    def test_match_numpy_in_the_safe_range(self, u):
        """Helpers agree with direct numpy formulas where those are accurate."""
        assert x_coth_x(u) == pytest.approx(u / np.tanh(u), rel=1e-13)
        assert x_csch_x(u) == pytest.approx(u / np.sinh(u), rel=1e-13)
        assert tanh_over_x(u) == pytest.approx(np.tanh(u) / u, rel=1e-13)
        assert coth(u) == pytest.approx(1.0 / np.tanh(u), rel=1e-13)
        assert expm1_neg(u) == pytest.approx(math.exp(-u) - 1.0, rel=1e-12)

    def test_limits_at_zero(self):
        """Removable singularities take their limiting values."""
        assert x_coth_x(0.0) == 1.0
        assert x_csch_x(0.0) == 1.0
        assert tanh_over_x(0.0) == 1.0
        assert expm1_neg(0.0) == 0.0
        assert x_minus_tanh_x(0.0) == 0.0

    def test_small_argument_series(self):
        """Series branches stay accurate just below the switch-over."""
        u = 5e-7
        assert x_coth_x(u) == pytest.approx(1.0 + u * u / 3.0, rel=1e-15)
        assert expm1_neg(1e-9) == pytest.approx(-1e-9 * (1.0 - 0.5e-9), rel=1e-15)

    def test_no_overflow_for_large_arguments(self):
        """Arguments beyond ~710 do not overflow."""
        assert x_csch_x(800.0) == pytest.approx(0.0, abs=1e-300)
        assert coth(1000.0) == 1.0
        assert sinh_ratio(800.0, 801.0, 1.0) == pytest.approx(math.exp(-1.0), rel=1e-14)

    def test_sinh_ratio_matches_direct_ratio(self):
        """sinh(mx)/sinh(nx) agrees with numpy for moderate arguments."""
        m = np.array([1.0, 2.0, 5.0])
        n = np.array([3.0, 4.0, 5.0])
        expected = np.sinh(m * 0.3) / np.sinh(n * 0.3)
        np.testing.assert_allclose(sinh_ratio(m, n, 0.3), expected, rtol=1e-13)

    def test_array_shape_is_preserved(self):
        """Array inputs come back with their shape."""
        u = np.linspace(0.0, 3.0, 7).reshape(7, 1)
        assert np.shape(x_coth_x(u)) == (7, 1)
        assert np.shape(x_minus_tanh_x(u)) == (7, 1)

    def test_x_minus_tanh_x_both_branches(self):
        """Series and direct branches agree across the switch-over."""
        below = x_minus_tanh_x(0.0099)
        above = x_minus_tanh_x(0.0101)
        assert below == pytest.approx(0.0099 ** 3 / 3.0, rel=1e-3)
        assert above == pytest.approx(0.0101 - math.tanh(0.0101), rel=1e-8)
        assert x_minus_tanh_x(0.3) == pytest.approx(0.3 - math.tanh(0.3), rel=1e-14)

    def test_exported_helpers(self):
        """Only helpers the kernel and slicing code call are exported."""
        assert set(hyperbolic.__all__) == {
            "SERIES_THRESHOLD", "EXPM1_THRESHOLD", "expm1_neg", "x_coth_x", "x_csch_x",
            "tanh_over_x", "coth", "sinh_ratio", "x_minus_tanh_x",
        }

    def test_positive_only_helpers_reject_zero(self):
        with pytest.raises(ValueError):
            coth(0.0)
        with pytest.raises(ValueError):
            coth(-1.0)
        with pytest.raises(ValueError):
            sinh_ratio(1.0, 2.0, 0.0)


class TestConvergenceTools:
    """Tests for order fitting and Richardson extrapolation."""

    def test_fit_order_recovers_exact_power(self):
        steps = [0.1, 0.05, 0.025, 0.0125]
        errors = [3.0 * h ** 2 for h in steps]
        assert fit_order(steps, errors) == pytest.approx(2.0, abs=1e-12)

    def test_fit_order_skips_zero_errors(self):
        steps = [0.1, 0.05, 0.025]
        errors = [0.1, 0.05, 0.0]
        assert fit_order(steps, errors) == pytest.approx(1.0, abs=1e-12)

    def test_fit_order_needs_two_points(self):
        with pytest.raises(ValueError):
            fit_order([0.1, 0.05], [0.1, 0.0])
        with pytest.raises(ValueError):
            fit_order([0.1], [0.1, 0.2])

    def test_richardson_removes_leading_terms(self):
        """f(h) = 3 + 2h + 5h² extrapolates to 3 from h = 1, 1/2, 1/4."""
        values = [3.0 + 2.0 * h + 5.0 * h * h for h in (1.0, 0.5, 0.25)]
        assert richardson_extrapolate(values, p=1) == pytest.approx(3.0, abs=1e-12)

    def test_richardson_complex_values(self):
        values = [(1 + 2j) + (0.5 - 1j) * h ** 2 for h in (0.2, 0.1)]
        result = richardson_extrapolate(values, p=2)
        assert abs(result - (1 + 2j)) < 1e-14

    def test_richardson_needs_two_values(self):
        with pytest.raises(ValueError):
            richardson_extrapolate([1.0], p=2)

    def test_relative_error(self):
        assert relative_error(1.1, 1.0) == pytest.approx(0.1)
        assert relative_error(1j, 0.0) == pytest.approx(1.0)
