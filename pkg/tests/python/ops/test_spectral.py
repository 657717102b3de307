"""
Unit tests for periodization and Fourier multipliers.
"""

import math

import numpy as np
import pytest

from ops import spectral
from ops.grids import Grading, SpatialGrid, TimeDomain, make_graded_grid, sample
from utils.error_handling import GridResolutionError, ValidationError


class TestReflection:
    """Test the reflection extension building blocks."""

    def test_reflection_coefficients(self):
        """Test the low orders and the moment conditions."""
        np.testing.assert_allclose(spectral.reflection_coefficients(0), [1.0])
        np.testing.assert_allclose(spectral.reflection_coefficients(1), [3.0, -2.0])

        lam = spectral.reflection_coefficients(3)
        j = np.arange(1, 5)
        for i in range(4):
            assert np.sum(lam * (-j) ** i) == pytest.approx(1.0, abs=1e-10)

    def test_reflection_order_limit(self):
        """Test orders above four are rejected."""
        with pytest.raises(ValidationError):
            spectral.reflection_coefficients(5)

    def test_smooth_cutoff(self):
        """Test the cutoff is 1 before start, 0 after end and 1/2 midway."""
        values = spectral.smooth_cutoff(np.array([0.5, 1.0, 1.25, 1.5, 2.0]), 1.0, 1.5)

        np.testing.assert_allclose(values, [1.0, 1.0, 0.5, 0.0, 0.0], atol=1e-15)
        assert spectral.support_end(1.0, 0) == 1.5

    def test_reflect_beyond_needs_nodes(self):
        """Test a grid with too few nodes in (T/2, T) is rejected."""
        u = sample(lambda t: t, make_graded_grid(TimeDomain.finite(1.0), 8, Grading.uniform()))

        with pytest.raises(GridResolutionError):
            spectral.reflect_beyond(u, np.array([1.05]), 3)

    def test_reflection_reproduces_quadratics(self, uniform_grid):
        """Test the order-3 reflection continues t^2 smoothly past T."""
        u = sample(lambda t: t**2, uniform_grid)
        point = 1.0 + 1.0 / 128

        value = spectral.reflect_beyond(u, np.array([point]), 3)[0, 0]

        assert value == pytest.approx(point**2, rel=1e-5)


class TestPeriodize:
    """Test the time torus."""

    def test_finite_domain(self, uniform_grid):
        """Test the padded torus keeps the data and vanishes past the support."""
        u = sample(lambda t: 1.0 + t, uniform_grid)

        signal = spectral.periodize(u)

        assert signal.n == 256
        assert signal.period == pytest.approx(4.0)
        assert signal.n_inner == 64
        np.testing.assert_array_equal(signal.values[:64], u.values)
        beyond = (np.arange(256) + 0.5) / 64 >= spectral.support_end(1.0, 3)
        assert np.all(signal.values[beyond] == 0.0)

    def test_periodic_domain(self, periodic_grid):
        """Test periodic data keeps its own period."""
        u = sample(np.sin, periodic_grid)

        signal = spectral.periodize(u)

        assert signal.period == pytest.approx(2 * math.pi)
        assert signal.n == 64
        np.testing.assert_allclose(spectral.unperiodize(signal, signal.values), u.values)

    def test_graded_round_trip(self, graded_grid):
        """Test graded data goes to a lattice and back through splines."""
        u = sample(lambda t: np.cos(t), graded_grid)

        signal = spectral.periodize(u)
        back = spectral.unperiodize(signal, signal.values)

        assert signal.n_inner == 256
        np.testing.assert_allclose(back, u.values, rtol=1e-6, atol=1e-8)


class TestMultipliers:
    """Test symbols and their application."""

    def test_principal_power(self):
        """Test branch, zero and exponent-zero conventions."""
        assert spectral.principal_power(-1.0, 0.5)[()] == pytest.approx(1j)
        assert spectral.principal_power(0.0, 0.5)[()] == 0.0
        np.testing.assert_array_equal(spectral.principal_power(np.array([0.0, 2.0]), 0.0), [1.0, 1.0])

    def test_identity_multiplier(self, uniform_grid):
        """Test the symbol 1 returns the data on a uniform grid."""
        u = sample(lambda t: np.exp(-t), uniform_grid)

        out = spectral.apply_time_multiplier(u, lambda xi: np.ones_like(xi, dtype=complex))

        np.testing.assert_allclose(out, u.values, rtol=1e-12)

    def test_time_derivative_on_periodic_data(self, periodic_grid):
        """Test (d/dt) sin = cos through the symbol i xi."""
        u = sample(np.sin, periodic_grid)

        out = spectral.apply_time_multiplier(u, lambda xi: spectral.time_deriv_plus_symbol(xi, 1.0, 0.0))

        np.testing.assert_allclose(out[:, 0], np.cos(periodic_grid.nodes), atol=1e-12)

    def test_spatial_bessel_symbol(self):
        """Test (1 - Laplacian) cos(3x) = 10 cos(3x)."""
        grid = SpatialGrid((32,))
        x = grid.axis_nodes(0)

        out = spectral.apply_spatial_symbol(np.cos(3 * x), grid, spectral.bessel_symbol(grid, 2.0))

        np.testing.assert_allclose(out, 10.0 * np.cos(3 * x), atol=1e-11)
        np.testing.assert_allclose(spectral.xi_squared(SpatialGrid((8,))), [0, 1, 4, 9, 16, 9, 4, 1], atol=1e-12)
