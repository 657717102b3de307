"""
Unit tests for weighted Lebesgue, Sobolev, fractional and space-time norms.
"""

import math

import numpy as np
import pytest

from ops.grids import Grading, SpaceTimeField, SpatialGrid, SpatialSample, TimeDomain, WeightParams, make_graded_grid, sample, sample_field
from ops.norms import (
    B,
    H,
    H0,
    L,
    W,
    W0,
    NormResult,
    SpaceSpec,
    anisotropic_norm,
    coarsen,
    finite_difference,
    fractional_norm,
    local_embedding_ratio,
    mixed_norm,
    semigroup_besov_norm,
    slobodetskii_seminorm,
    sobolev_k_norm,
    sup_norm_derivatives,
    unweighted_lp_norm,
    weighted_lp_norm,
)
from ops.oracle import exact_single_mode_besov
from utils.error_handling import (
    GridResolutionError,
    LimitExponentError,
    MembershipError,
    ProcessingError,
    ValidationError,
)


class TestSpaceSpec:
    """Test space requests and their exclusions."""

    def test_limit_exponent_excluded(self):
        """Test W0 at s = 1 - mu + 1/p is refused."""
        with pytest.raises(LimitExponentError) as exc:
            SpaceSpec(W0, 0.5, WeightParams(2.0, 1.0))
        assert exc.value.details["k"] == 0

    def test_family_constraints(self):
        """Test L needs order 0 and B a noninteger order."""
        wp = WeightParams(2.0, 1.0)
        with pytest.raises(ValidationError):
            SpaceSpec(L, 0.5, wp)
        with pytest.raises(ValidationError):
            SpaceSpec(B, 1.0, wp)
        with pytest.raises(ValidationError):
            SpaceSpec("Q", 1.0, wp)

    def test_order_parts(self):
        """Test the integer and fractional parts of the order."""
        spec = SpaceSpec(W, 1.25, WeightParams(2.0, 0.75))

        assert spec.order.integer_part == 1
        assert spec.order.fractional_part == pytest.approx(0.25)
        assert spec.describe() == {"family": "W", "s": 1.25, "p": 2.0, "mu": 0.75}


class TestNormResult:
    """Test norm result validation and encoding."""

    def test_negative_value_rejected(self):
        """Test negative and non-finite values raise ProcessingError."""
        with pytest.raises(ProcessingError):
            NormResult(-1.0, 8)
        with pytest.raises(ProcessingError):
            NormResult(1.0, 8, est_error=math.nan)

    def test_to_dict(self):
        """Test reals are written as decimal strings."""
        result = NormResult(0.5, 64, 0.01, {"L": 0.5})

        assert result.to_dict() == {
            "value": "0.5",
            "resolution": 64,
            "est_error": "0.01",
            "components": {"L": "0.5"},
            "truncation": {},
        }


class TestWeightedLp:
    """Test the weighted Lebesgue norm."""

    def test_constant_unweighted(self, uniform_grid, unweighted):
        """Test |1|_{L_2(0,1)} = 1."""
        result = weighted_lp_norm(sample(lambda t: 1.0, uniform_grid), unweighted)

        assert result.value == pytest.approx(1.0, rel=1e-12)
        assert result.resolution == 64
        assert result.est_error == pytest.approx(0.0, abs=1e-12)
        assert result.components == {"L": result.value}

    def test_weight_cancels_singularity(self, graded_grid, weighted):
        """Test t^{-1/4} has weighted L_2 norm 1 for mu = 3/4."""
        result = weighted_lp_norm(sample(lambda t: t**-0.25, graded_grid), weighted)

        assert result.value == pytest.approx(1.0, rel=1e-10)

    def test_weighted_constant(self, graded_grid, weighted):
        """Test |1|_{L_{2,3/4}} = (int t^{1/2})^{1/2} = sqrt(2/3)."""
        result = weighted_lp_norm(sample(lambda t: 1.0, graded_grid), weighted)

        assert result.value == pytest.approx(math.sqrt(2.0 / 3.0), rel=1e-3)

    def test_vector_values_use_euclidean_fiber(self, uniform_grid, unweighted):
        """Test (3, 4) has pointwise norm 5."""
        u = sample(lambda t: np.column_stack((np.full_like(t, 3.0), np.full_like(t, 4.0))), uniform_grid, d=2)

        assert weighted_lp_norm(u, unweighted).value == pytest.approx(5.0, rel=1e-12)

    def test_unweighted_path_agrees(self, graded_grid):
        """Test the independent unweighted path matches mu = 1."""
        u = sample(lambda t: np.sin(3 * t) + 2.0, graded_grid)

        independent = unweighted_lp_norm(u, 3.0).value
        weighted = weighted_lp_norm(u, WeightParams(3.0, 1.0), estimate=False).value

        assert independent == pytest.approx(weighted, rel=1e-12)
        assert unweighted_lp_norm(u.scaled(0.0), 2.0).value == 0.0

    def test_half_line_truncation_info(self):
        """Test half-line data reports its truncation point and tail bound."""
        grid = make_graded_grid(TimeDomain.half_line(10.0), 64, Grading.uniform())
        result = weighted_lp_norm(sample(lambda t: np.exp(-t), grid), WeightParams(2.0, 1.0))

        assert result.truncation["T_trunc"] == 10.0
        assert 0.0 < result.truncation["tail_bound"] < 1e-8


class TestSobolev:
    """Test integer and fractional Sobolev norms."""

    def test_linear_function(self, uniform_grid, unweighted):
        """Test |t|_{W^1_2(0,1)} = (1/3 + 1)^{1/2}."""
        result = sobolev_k_norm(sample(lambda t: t, uniform_grid), 1, unweighted)

        assert result.value == pytest.approx(math.sqrt(4.0 / 3.0), rel=1e-4)
        assert set(result.components) == {"L", "d1"}
        assert result.components["d1"] == pytest.approx(1.0, rel=1e-12)

    def test_constant_has_no_derivative_part(self, uniform_grid, weighted):
        """Test the W^1 norm of a constant equals its L norm."""
        u = sample(lambda t: 2.0, uniform_grid)

        assert sobolev_k_norm(u, 1, weighted).value == pytest.approx(weighted_lp_norm(u, weighted).value, rel=1e-12)

    def test_resolution_guard(self, unweighted):
        """Test n < 8 * 2^k raises GridResolutionError."""
        grid = make_graded_grid(TimeDomain.finite(1.0), 16, Grading.uniform())

        with pytest.raises(GridResolutionError) as exc:
            sobolev_k_norm(sample(lambda t: t, grid), 2, unweighted)
        assert exc.value.details == {"n": 16, "k": 2}

    def test_order_range(self, uniform_grid, unweighted):
        """Test k above the supported maximum is a validation error."""
        with pytest.raises(ValidationError):
            sobolev_k_norm(sample(lambda t: t, uniform_grid), 5, unweighted)

    def test_finite_difference_exact_for_quadratics(self, graded_grid):
        """Test second-order differences differentiate t^2 exactly."""
        u = sample(lambda t: t**2, graded_grid)

        np.testing.assert_allclose(finite_difference(u, 1).values[:, 0], 2.0 * graded_grid.nodes, rtol=1e-8)

    def test_coarsen_halves_uniform_grid(self, uniform_grid):
        """Test coarsening merges neighbouring cells."""
        coarse = coarsen(sample(lambda t: t, uniform_grid))

        assert coarse.grid.n == 32
        assert coarse.grid.is_uniform
        np.testing.assert_allclose(coarse.values[:, 0], coarse.nodes, rtol=1e-12)


class TestFractional:
    """Test Slobodetskii seminorms and the fractional families."""

    def test_seminorm_of_constant(self, uniform_grid, unweighted):
        """Test constants have zero seminorm."""
        result = slobodetskii_seminorm(sample(lambda t: 3.0, uniform_grid), 0.5, unweighted)

        assert result.value == 0.0
        assert result.components == {"seminorm": 0.0}

    def test_seminorm_of_linear_function(self, uniform_grid, unweighted):
        """Test [t]_{1/2} approaches its exact value sqrt(1/2) from below."""
        result = slobodetskii_seminorm(sample(lambda t: t, uniform_grid), 0.5, unweighted)

        assert result.value == pytest.approx(math.sqrt(0.5), rel=1e-2)
        assert result.value < math.sqrt(0.5)

    def test_seminorm_order_range(self, uniform_grid, unweighted):
        """Test s outside (0, 1) is rejected."""
        with pytest.raises(ValidationError):
            slobodetskii_seminorm(sample(lambda t: t, uniform_grid), 1.5, unweighted)

    def test_integer_order_matches_sobolev(self, uniform_grid, unweighted):
        """Test W^1 through fractional_norm equals sobolev_k_norm."""
        u = sample(lambda t: np.cos(t), uniform_grid)

        via_spec = fractional_norm(u, SpaceSpec(W, 1.0, unweighted)).value

        assert via_spec == pytest.approx(sobolev_k_norm(u, 1, unweighted).value, rel=1e-12)

    def test_bessel_order_zero_is_lebesgue(self, graded_grid, weighted):
        """Test H^0 is the weighted L_p norm."""
        u = sample(lambda t: np.exp(-t), graded_grid)

        h0 = fractional_norm(u, SpaceSpec(H, 0.0, weighted))

        assert h0.value == pytest.approx(weighted_lp_norm(u, weighted).value, rel=1e-12)
        assert set(h0.components) == {"H"}

    def test_fractional_parts(self, uniform_grid, unweighted):
        """Test W^{3/2} combines the W^1 parts with the seminorm of u'."""
        result = fractional_norm(sample(lambda t: t, uniform_grid), SpaceSpec(W, 1.5, unweighted))

        assert set(result.components) == {"L", "d1", "seminorm"}
        assert result.components["seminorm"] == pytest.approx(0.0, abs=1e-10)
        assert result.value == pytest.approx(math.sqrt(4.0 / 3.0), rel=1e-4)

    def test_zero_family_membership(self, uniform_grid, unweighted):
        """Test W0^1 rejects data with u(0) != 0 and accepts u = t."""
        with pytest.raises(MembershipError) as exc:
            fractional_norm(sample(lambda t: 1.0, uniform_grid), SpaceSpec(W0, 1.0, unweighted))
        assert exc.value.details["j"] == 0

        result = fractional_norm(sample(lambda t: t, uniform_grid), SpaceSpec(W0, 1.0, unweighted))
        assert result.value == pytest.approx(math.sqrt(4.0 / 3.0), rel=1e-4)

    def test_zero_bessel_family_shares_symbol(self, uniform_grid, unweighted):
        """Test H0^s and H^s give the same norm on data with vanishing trace."""
        u = sample(lambda t: t * t * (1.0 - t) ** 2, uniform_grid)

        plain = fractional_norm(u, SpaceSpec(H, 0.7, unweighted), estimate=False)
        zero = fractional_norm(u, SpaceSpec(H0, 0.7, unweighted), check_membership=False, estimate=False)

        assert zero.value == pytest.approx(plain.value, rel=1e-12)

    def test_zero_bessel_family_membership(self, uniform_grid, unweighted):
        """Test H0^s with s above the trace limit rejects u = 1."""
        with pytest.raises(MembershipError):
            fractional_norm(sample(lambda t: 1.0, uniform_grid), SpaceSpec(H0, 0.7, unweighted))

    def test_membership_check_can_be_skipped(self, uniform_grid, unweighted):
        """Test check_membership=False measures the norm anyway."""
        result = fractional_norm(
            sample(lambda t: 1.0, uniform_grid), SpaceSpec(W0, 1.0, unweighted), check_membership=False
        )

        assert result.value == pytest.approx(1.0, rel=1e-12)


class TestSpaceTimeNorms:
    """Test anisotropic, mixed and semigroup norms."""

    def test_anisotropic_norm(self, uniform_grid, unweighted):
        """Test |cos x|: time part sqrt(pi), space part |(1 - Laplacian) cos x| = 2 sqrt(pi)."""
        field = sample_field(lambda t, x: np.cos(x) + 0.0 * t, uniform_grid, SpatialGrid((16,)))

        result = anisotropic_norm(field, SpaceSpec(L, 0.0, unweighted), 2.0)

        assert result.components["time"] == pytest.approx(math.sqrt(math.pi), rel=1e-10)
        assert result.components["space"] == pytest.approx(2.0 * math.sqrt(math.pi), rel=1e-10)
        assert result.value == pytest.approx(3.0 * math.sqrt(math.pi), rel=1e-10)
        assert result.resolution == 64 * 16

    def test_anisotropic_needs_full_torus(self, uniform_grid, unweighted):
        """Test spatial orders on a half-torus are refused."""
        field = sample_field(lambda t, x, y: 1.0 + 0.0 * t, uniform_grid, SpatialGrid((8, 4), half=True))

        with pytest.raises(ValidationError):
            anisotropic_norm(field, SpaceSpec(L, 0.0, unweighted), 1.0)

    def test_mixed_norm_order_zero(self, uniform_grid, unweighted):
        """Test H^0(H^0) is the space-time L_2 norm."""
        field = sample_field(lambda t, x: np.cos(x) + 0.0 * t, uniform_grid, SpatialGrid((16,)))

        assert mixed_norm(field, 0.0, 0.0, unweighted).value == pytest.approx(math.sqrt(math.pi), rel=1e-10)

    def test_semigroup_besov_single_mode(self, unweighted):
        """Test cos(2x) against the closed form for one Fourier mode."""
        grid = SpatialGrid((64,))
        x = SpatialSample(grid, np.cos(2.0 * grid.axis_nodes(0)))

        result = semigroup_besov_norm(x, 0.5, unweighted)

        expected = exact_single_mode_besov(2.0, 0.5, 1, math.sqrt(math.pi))
        assert result.value == pytest.approx(expected, rel=1e-3)
        assert result.truncation == {"sigma_min": 1e-6, "sigma_max": 1e3}

    def test_semigroup_besov_zero_and_range(self, unweighted):
        """Test zero data has norm zero and theta must lie in (0, 1)."""
        x = SpatialSample(SpatialGrid((16,)), np.zeros(16))

        assert semigroup_besov_norm(x, 0.5, unweighted).value == 0.0
        with pytest.raises(ValidationError):
            semigroup_besov_norm(x, 1.0, unweighted)


class TestEmbeddingMeasurements:
    """Test sup norms and local ratios."""

    def test_sup_norm_derivatives(self, uniform_grid):
        """Test max(sup|t|, sup|1|) on (0, 1) is 1."""
        result = sup_norm_derivatives(sample(lambda t: t, uniform_grid), 1)

        assert result.value == pytest.approx(1.0, rel=1e-10)
        assert result.components["sup_d0"] == pytest.approx(uniform_grid.nodes[-1])

    def test_local_embedding_ratio(self, uniform_grid, unweighted):
        """Test the local norm on (1/2, 1) is smaller than the global one."""
        result = local_embedding_ratio(sample(lambda t: 1.0 + t, uniform_grid), unweighted, 1.0, 0.5)

        assert 0.0 < result.value < 1.0
        assert result.components["t0"] == 0.5

    def test_local_embedding_t0_range(self, uniform_grid, unweighted):
        """Test t0 outside (0, T) is rejected."""
        with pytest.raises(ValidationError):
            local_embedding_ratio(sample(lambda t: t, uniform_grid), unweighted, 1.0, 1.5)
