"""
Unit tests for the weight isomorphism, extensions, fractional powers and traces.
"""

import math

import numpy as np
import pytest

from ops.grids import Grading, SpatialGrid, SpatialSample, TimeDomain, WeightParams, make_graded_grid, sample, sample_field
from ops.norms import unweighted_lp_norm, weighted_lp_norm
from ops.operators import (
    LAPLACIAN,
    TIME_DERIV_MINUS,
    TIME_DERIV_PLUS,
    FractionalOperatorSpec,
    SumOperatorSpec,
    dore_venni_ratio,
    evaluate_extend_zero,
    extend_general,
    extend_spatial,
    extend_zero,
    fractional_apply,
    generator_residual,
    phi_mu,
    restrict_spatial,
    spatial_derivative,
    sum_operator_apply,
    sum_operator_inverse_apply,
    trace_rightinverse_S,
    trace_t0,
    trace_t0_diagnostic,
    trace_y0,
    trace_y0_rightinverse,
    translate,
)
from utils.error_handling import BranchCutError, ValidationError


def _periodic_grid(n=64):
    return make_graded_grid(TimeDomain.periodic(2 * math.pi), n, Grading.uniform())


class TestOperatorSpecs:
    """Test operator spec validation."""

    def test_time_order_range(self):
        """Test time orders must lie in [0, 2)."""
        FractionalOperatorSpec(TIME_DERIV_MINUS, 1.5)
        with pytest.raises(ValidationError):
            FractionalOperatorSpec(TIME_DERIV_MINUS, 2.0)
        with pytest.raises(ValidationError):
            FractionalOperatorSpec(TIME_DERIV_PLUS, 0.5, shift=-1.0)

    def test_laplacian_orders(self):
        """Test Laplacian orders may exceed 2 but not be negative."""
        assert FractionalOperatorSpec(LAPLACIAN, 3.0).describe() == {"kind": "laplacian", "order": 3.0, "shift": 1.0}
        with pytest.raises(ValidationError):
            FractionalOperatorSpec(LAPLACIAN, -1.0)

    def test_sum_operator_parts(self):
        """Test L needs a time_deriv_minus part, a Laplacian part and a nonzero shift."""
        spec = SumOperatorSpec.parabolic(2)
        assert spec.space.order == 2
        with pytest.raises(ValidationError):
            SumOperatorSpec(FractionalOperatorSpec(TIME_DERIV_PLUS, 1.0), FractionalOperatorSpec(LAPLACIAN, 1.0))
        with pytest.raises(ValidationError):
            SumOperatorSpec.parabolic(1, time_shift=0.0, space_shift=0.0)


class TestWeightIsomorphism:
    """Test Phi_mu."""

    def test_forward_inverse(self, graded_grid, weighted):
        """Test the inverse undoes the forward map."""
        u = sample(lambda t: np.cos(t), graded_grid)

        back = phi_mu(phi_mu(u, weighted), weighted, direction="inverse")

        np.testing.assert_allclose(back.values, u.values, rtol=1e-12)

    def test_isometry(self, graded_grid, weighted):
        """Test |Phi_mu u|_{L_p} = |u|_{L_{p,mu}} on the same grid."""
        u = sample(lambda t: 1.0 + t**2, graded_grid)

        lhs = unweighted_lp_norm(phi_mu(u, weighted), 2.0).value
        rhs = weighted_lp_norm(u, weighted, estimate=False).value

        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_bad_direction(self, uniform_grid, weighted):
        """Test unknown directions are rejected."""
        with pytest.raises(ValidationError):
            phi_mu(sample(lambda t: t, uniform_grid), weighted, direction="sideways")


class TestExtensions:
    """Test the temporal and spatial extensions."""

    def test_extend_zero_keeps_data(self, uniform_grid, unweighted):
        """Test the extension equals u on (0, T) and lives on (0, 2T)."""
        u = sample(lambda t: 1.0 + t, uniform_grid)

        extended = extend_zero(u, unweighted)

        assert extended.grid.T == 2.0
        assert extended.grid.n == 128
        np.testing.assert_array_equal(extended.values[:64], u.values)

    def test_extend_zero_constant_pieces(self, uniform_grid, unweighted):
        """Test a constant continues as 1 on (T, 3T/2) and 3 on (3T/2, 2T) for mu = 1."""
        u = sample(lambda t: 1.0, uniform_grid)

        outer = extend_zero(u, unweighted).values[64:, 0]

        np.testing.assert_allclose(outer[:32], 1.0, rtol=1e-12)
        np.testing.assert_allclose(outer[32:], 3.0, rtol=1e-12)

    def test_evaluate_extend_zero(self, uniform_grid, unweighted):
        """Test pointwise evaluation inside, in the tail and past 2T."""
        u = sample(lambda t: 1.0, uniform_grid)

        values = evaluate_extend_zero(u, unweighted, [0.5, 1.25, 1.75, 2.0, 3.0])[:, 0]

        np.testing.assert_allclose(values, [1.0, 1.0, 3.0, 0.0, 0.0], rtol=1e-12)

    def test_extend_general(self, uniform_grid):
        """Test the reflection continues t^2 past T and vanishes from T + T/8 on."""
        u = sample(lambda t: t**2, uniform_grid)

        extended = extend_general(u, 3)
        outer_nodes = extended.nodes[64:]
        outer = extended.values[64:, 0]

        np.testing.assert_array_equal(extended.values[:64], u.values)
        assert outer[0] == pytest.approx(outer_nodes[0] ** 2, rel=1e-5)
        assert np.all(outer[outer_nodes >= 1.125] == 0.0)

    def test_extend_general_order_range(self, uniform_grid):
        """Test reflection orders above four are rejected."""
        with pytest.raises(ValidationError):
            extend_general(sample(lambda t: t, uniform_grid), 5)

    def test_extend_spatial_even(self):
        """Test k = 0 is the even reflection and restriction undoes it."""
        half = SpatialGrid((8, 4), half=True)
        values = np.arange(32, dtype=float).reshape(8, 4)
        u = SpatialSample(half, values)

        full = extend_spatial(u, 0)

        assert full.grid.shape == (8, 8)
        np.testing.assert_array_equal(full.values[:, :4], values[:, ::-1])
        np.testing.assert_array_equal(restrict_spatial(full, half).values, values)

    def test_extend_spatial_keeps_constants(self):
        """Test higher-order reflections blend to a constant for constant data."""
        half = SpatialGrid((8, 16), half=True)
        u = SpatialSample(half, np.full((8, 16), 2.0))

        full = extend_spatial(u, 1)

        np.testing.assert_allclose(full.values, 2.0, rtol=1e-12)

    def test_extend_spatial_needs_half_torus(self):
        """Test full-torus data cannot be extended."""
        with pytest.raises(ValidationError):
            extend_spatial(SpatialSample(SpatialGrid((8,)), np.zeros(8)))


class TestTranslation:
    """Test the left translation semigroup."""

    def test_translate_linear(self, uniform_grid):
        """Test (Lambda_{1/4} t)(tau) = tau + 1/4, zero past T."""
        u = sample(lambda t: t, uniform_grid)

        shifted = translate(u, 0.25).values[:, 0]
        nodes = uniform_grid.nodes
        inside = nodes + 0.25 <= 1.0

        np.testing.assert_allclose(shifted[inside], nodes[inside] + 0.25, rtol=1e-12)
        assert np.all(shifted[~inside] == 0.0)

    def test_translate_zero_and_negative(self, uniform_grid):
        """Test t0 = 0 is the identity and negative shifts are refused."""
        u = sample(lambda t: t, uniform_grid)

        np.testing.assert_array_equal(translate(u, 0.0).values, u.values)
        with pytest.raises(ValidationError):
            translate(u, -0.1)

    def test_generator_residual(self, uniform_grid, unweighted):
        """Test the difference quotient of t^2 is off from u' by exactly h."""
        h = 1.0 / 64
        residual = generator_residual(sample(lambda t: t**2, uniform_grid), h, unweighted)

        assert 0.0 < residual <= h * (1.0 + 1e-9)


class TestFractionalPowers:
    """Test Fourier multiplier application."""

    def test_order_zero_is_identity(self, uniform_grid):
        """Test order 0 returns the data unchanged."""
        u = sample(lambda t: t, uniform_grid)

        out = fractional_apply(u, FractionalOperatorSpec(TIME_DERIV_MINUS, 0.0))

        np.testing.assert_array_equal(out.values, u.values)

    def test_half_powers_compose(self):
        """Test (1 - d/dt)^{1/2} twice equals 1 - d/dt on periodic data."""
        u = sample(np.sin, _periodic_grid())
        half = FractionalOperatorSpec(TIME_DERIV_MINUS, 0.5)

        twice = fractional_apply(fractional_apply(u, half), half)
        once = fractional_apply(u, FractionalOperatorSpec(TIME_DERIV_MINUS, 1.0))

        np.testing.assert_allclose(twice.values, once.values, atol=1e-12)
        np.testing.assert_allclose(once.values[:, 0], np.sin(u.nodes) - np.cos(u.nodes), atol=1e-12)

    def test_branch_cut(self):
        """Test shift 0 with a nonzero mean and a noninteger order."""
        u = sample(lambda t: 1.0, _periodic_grid())

        with pytest.raises(BranchCutError):
            fractional_apply(u, FractionalOperatorSpec(TIME_DERIV_MINUS, 0.5, shift=0.0))

    def test_laplacian_on_spatial_sample(self):
        """Test (1 - Laplacian) cos(3x) = 10 cos(3x) and time kinds are refused."""
        grid = SpatialGrid((32,))
        u = SpatialSample(grid, np.cos(3 * grid.axis_nodes(0)))

        out = fractional_apply(u, FractionalOperatorSpec(LAPLACIAN, 1.0))

        np.testing.assert_allclose(out.values, 10.0 * u.values, atol=1e-11)
        with pytest.raises(ValidationError):
            fractional_apply(u, FractionalOperatorSpec(TIME_DERIV_MINUS, 0.5))

    def test_spatial_derivative(self, uniform_grid):
        """Test d/dx sin(x) = cos(x) on a field."""
        field = sample_field(lambda t, x: np.sin(x) + 0.0 * t, uniform_grid, SpatialGrid((16,)))

        out = spatial_derivative(field, 0)

        np.testing.assert_allclose(out.values, np.cos(field.xgrid.axis_nodes(0))[None, :].repeat(64, 0), atol=1e-12)
        with pytest.raises(ValidationError):
            spatial_derivative(field, 1)


class TestSumOperator:
    """Test L = (1 - d/dt) + (-Laplacian) on periodic space-time data."""

    def _field(self):
        return sample_field(lambda t, x: np.sin(t) * np.cos(x), _periodic_grid(32), SpatialGrid((16,)))

    def test_apply(self):
        """Test L (sin t cos x) = (2 sin t - cos t) cos x."""
        u = self._field()
        t, x = np.meshgrid(u.tgrid.nodes, u.xgrid.axis_nodes(0), indexing="ij")

        out = sum_operator_apply(u, SumOperatorSpec.parabolic(1))

        np.testing.assert_allclose(out.values, (2 * np.sin(t) - np.cos(t)) * np.cos(x), atol=1e-10)

    def test_inverse_round_trip(self):
        """Test L^{-1} L u = u."""
        u = self._field()
        spec = SumOperatorSpec.parabolic(1)

        back = sum_operator_inverse_apply(sum_operator_apply(u, spec), spec)

        np.testing.assert_allclose(back.values, u.values, atol=1e-10)

    def test_dore_venni_ratio_bounded(self):
        """Test |a|^sigma |b|^{1-sigma} <= |a + b| for the parabolic symbol."""
        kt, kx = np.meshgrid(np.linspace(-50, 50, 41), np.linspace(-20, 20, 41), indexing="ij")
        spec = SumOperatorSpec.parabolic(1)

        for sigma in (0.0, 0.25, 0.5, 1.0):
            assert np.all(dore_venni_ratio(kt, kx, spec, sigma) <= 1.0 + 1e-12)
        with pytest.raises(ValidationError):
            dore_venni_ratio(kt, kx, spec, 1.5)


class TestTemporalTrace:
    """Test the trace at t = 0 and its right-inverse."""

    def test_affine_data_exact(self, graded_grid, weighted):
        """Test the trace of 2 + 3t is 2."""
        u = sample(lambda t: 2.0 + 3.0 * t, graded_grid)

        assert float(trace_t0(u, weighted)[0]) == pytest.approx(2.0, rel=1e-9)

    def test_diagnostic_agrees(self, graded_grid, unweighted):
        """Test sigma = T/4 and T/2 give the same trace for affine data."""
        diagnostic = trace_t0_diagnostic(sample(lambda t: 1.0 - t, graded_grid), unweighted)

        assert diagnostic.difference < 1e-9
        assert set(diagnostic.to_dict()) == {"sigma_T_over_4", "sigma_T_over_2", "difference"}

    def test_sigma_out_of_range(self, uniform_grid, unweighted):
        """Test sigma beyond T is rejected."""
        with pytest.raises(ValidationError):
            trace_t0(sample(lambda t: t, uniform_grid), unweighted, sigma=2.0)

    def test_semigroup_right_inverse(self, uniform_grid):
        """Test S c = e^{-t} c for constant data."""
        u0 = SpatialSample(SpatialGrid((8,)), np.full(8, 3.0))

        field = trace_rightinverse_S(u0, 1, uniform_grid)

        expected = 3.0 * np.exp(-uniform_grid.nodes)[:, None] * np.ones((1, 8))
        np.testing.assert_allclose(field.values, expected, rtol=1e-12)


class TestSpatialTrace:
    """Test the trace at y = 0 and its right-inverse."""

    def test_y_independent_field(self, uniform_grid):
        """Test the trace of a field constant in y is its layer."""
        field = sample_field(lambda t, x, y: t * np.cos(x) + 0.0 * y, uniform_grid, SpatialGrid((8, 4), half=True))

        trace = trace_y0(field)

        assert trace.xgrid.shape == (8,)
        np.testing.assert_allclose(trace.values, field.values[..., 0], rtol=1e-10, atol=1e-14)

    def test_one_dimensional_trace(self, uniform_grid):
        """Test a 1-D half-space field gives a function of t."""
        field = sample_field(lambda t, y: t + 0.0 * y, uniform_grid, SpatialGrid((4,), half=True))

        trace = trace_y0(field)

        np.testing.assert_allclose(trace.values[:, 0], uniform_grid.nodes, rtol=1e-10)

    def test_right_inverse_of_constant(self):
        """Test exp(-y L^{1/2}) c = c e^{-y} when only the zero mode is present."""
        tgrid = _periodic_grid(32)
        g = sample(lambda t: 2.0, tgrid)

        field = trace_y0_rightinverse(g, SumOperatorSpec.parabolic(1), 1)

        y = field.xgrid.axis_nodes(0)
        np.testing.assert_allclose(field.values, 2.0 * np.exp(-y)[None, :].repeat(32, 0), rtol=1e-10)

    def test_trace_of_right_inverse(self):
        """Test trace_y0 recovers a non-constant mode from the default layers."""
        g = sample(lambda t: np.cos(3.0 * t) + 0.5, _periodic_grid(64))

        field = trace_y0_rightinverse(g, SumOperatorSpec.parabolic(1), 1)
        recovered = trace_y0(field)

        assert field.xgrid.axis_nodes(0)[-1] < 1e-2
        error = np.linalg.norm(np.ravel(recovered.values) - np.ravel(g.values)) / np.linalg.norm(np.ravel(g.values))
        assert error <= 1e-6

    def test_right_inverse_spacing(self):
        """Test a non-positive layer spacing is rejected."""
        g = sample(lambda t: 1.0, _periodic_grid(32))

        with pytest.raises(ValidationError):
            trace_y0_rightinverse(g, SumOperatorSpec.parabolic(1), 1, y_spacing=0.0)

    def test_right_inverse_orders(self):
        """Test L must have time order 1 and space order m."""
        g = sample(lambda t: 1.0, _periodic_grid(32))

        with pytest.raises(ValidationError):
            trace_y0_rightinverse(g, SumOperatorSpec.parabolic(1), 2)
