"""
Tests for the reference path: closed forms, dense quadrature and brute-force K.
"""

import math

import pytest
from scipy import special

from ops.grids import WeightParams
from ops.oracle import (
    ClosedForm,
    brute_force_k,
    dense_quadrature,
    exact_derivative_lp,
    exact_seminorm_linear,
    exact_single_mode_interp,
    exact_weighted_lp,
    oracle_k_brute,
    oracle_weighted_lp,
    single_mode_k,
    validated_weighted_lp,
)
from utils.cache import get_oracle_cache
from utils.error_handling import ValidationError


class TestClosedForms:
    """Test closed-form weighted norms."""

    def test_trig(self, unweighted):
        """Test |sin(pi t)|_{L_2(0,1)} = sqrt(1/2)."""
        assert exact_weighted_lp(ClosedForm.trig(math.pi), unweighted, 1.0) == pytest.approx(math.sqrt(0.5), rel=1e-12)

    def test_gaussian(self, unweighted):
        """Test the error-function closed form of exp(-t^2)."""
        expected = math.sqrt(0.5 * math.sqrt(math.pi / 2.0) * special.erf(math.sqrt(2.0)))

        assert exact_weighted_lp(ClosedForm.gaussian(1.0), unweighted, 1.0) == pytest.approx(expected, rel=1e-12)

    def test_exponential(self, unweighted):
        """Test |e^{-t}|_{L_2(0,1)}."""
        expected = math.sqrt((1.0 - math.exp(-2.0)) / 2.0)

        assert exact_weighted_lp(ClosedForm.exponential(1.0), unweighted, 1.0) == pytest.approx(expected, rel=1e-12)

    def test_weighted_monomial(self, weighted):
        """Test |t|_{L_{2,3/4}(0,1)} = sqrt(1/3.5)."""
        assert exact_weighted_lp(ClosedForm.monomial(1.0), weighted, 1.0) == pytest.approx(math.sqrt(1.0 / 3.5), rel=1e-12)

    def test_non_integrable_monomial(self, unweighted):
        """Test t^{-1/2} is rejected for p = 2 without a weight."""
        with pytest.raises(ValidationError):
            exact_weighted_lp(ClosedForm.monomial(-0.5), unweighted, 1.0)

    def test_results_are_cached(self, unweighted):
        """Test repeated evaluations hit the oracle cache."""
        exact_weighted_lp(ClosedForm.trig(2.0), unweighted, 1.0)
        exact_weighted_lp(ClosedForm.trig(2.0), unweighted, 1.0)

        assert get_oracle_cache().stats()["hits"] >= 1

    def test_derivative_form(self):
        """Test (t^3)'' = 6t and (sin t)' = cos t."""
        second = ClosedForm.monomial(3.0).derivative_form(2)
        first = ClosedForm.trig(1.0).derivative(0.3)

        assert second.param == 1.0
        assert second.coefficient == pytest.approx(6.0)
        assert float(first) == pytest.approx(math.cos(0.3), rel=1e-12)

    def test_derivative_lp(self, unweighted):
        """Test |(t^2)'|_{L_2(0,1)} = |2t| = 2/sqrt(3)."""
        value = exact_derivative_lp(ClosedForm.monomial(2.0), unweighted, 1.0, 1)

        assert value == pytest.approx(2.0 / math.sqrt(3.0), rel=1e-12)

    def test_gaussian_has_no_derivative_form(self):
        """Test derivative_form refuses gaussians."""
        with pytest.raises(ValidationError):
            ClosedForm.gaussian(1.0).derivative_form(1)

    @pytest.mark.parametrize(
        "mu, expected",
        [
            (1.0, math.sqrt(0.5)),
            (0.75, math.sqrt(4.0 / 15.0)),
        ],
    )
    def test_seminorm_of_t(self, mu, expected):
        """Test the Beta-function seminorm of t for s = 1/2."""
        assert exact_seminorm_linear(WeightParams(2.0, mu), 0.5, 1.0) == pytest.approx(expected, rel=1e-12)

    def test_single_mode_formulas(self):
        """Test the one-mode K-functional and interpolation norm."""
        assert single_mode_k(2.0, 1.0, 3.0, 0.1) == pytest.approx(0.6)
        # p = 2, theta = 1/2: (B(1/2, 1/2) / 2)^(1/2) w^(1/2) = sqrt(pi w / 2)
        assert exact_single_mode_interp(2.0, 0.5, 2.0) == pytest.approx(math.sqrt(math.pi), rel=1e-12)


class TestDenseQuadrature:
    """Test the Richardson ladder."""

    def test_uniform_romberg(self):
        """Test t^2 on uniform cells extrapolates to 1/3 at rate 2."""
        result = dense_quadrature(lambda t: t**2, 1.0, levels=4, grading="uniform")

        assert result.extrapolated == pytest.approx(1.0 / 3.0, rel=1e-12)
        assert result.rate == pytest.approx(2.0, abs=1e-6)
        assert result.flagged is False
        assert len(result.ladder) == 4

    def test_constant_integrand(self):
        """Test an exact ladder reports an infinite rate and no flag."""
        result = dense_quadrature(lambda t: 0.0 * t + 2.0, 1.0, levels=3, grading="uniform")

        assert result.value == pytest.approx(2.0)
        assert math.isinf(result.rate)
        assert result.flagged is False

    def test_minimum_levels(self):
        """Test fewer than three levels are rejected."""
        with pytest.raises(ValidationError):
            dense_quadrature(lambda t: t, 1.0, levels=2)

    def test_validated_gate(self, weighted):
        """Test the self-consistency gate accepts a correct closed form."""
        assert validated_weighted_lp(ClosedForm.monomial(1.0), weighted, 1.0) == pytest.approx(math.sqrt(1.0 / 3.5))


class TestBruteForceK:
    """Test the certified brute-force K-functional."""

    def test_single_mode(self):
        """Test K(1/4) = min(1, 2/4) for one mode with weights (1, 2)."""
        result = brute_force_k([1.0], [1.0], [2.0], 0.25)

        assert result.value == pytest.approx(0.5, rel=1e-12)
        assert result.gap == pytest.approx(0.0, abs=1e-12)

    def test_zero_data(self):
        """Test zero coefficients give K = 0."""
        assert brute_force_k([0.0, 0.0], [1.0, 1.0], [1.0, 2.0], 0.5).value == 0.0

    def test_too_many_modes(self):
        """Test more than sixteen modes are refused."""
        with pytest.raises(ValidationError):
            brute_force_k([1.0] * 17, [1.0] * 17, [1.0] * 17, 0.5)


class TestOracleHandlers:
    """Test the command handlers."""

    def test_weighted_lp(self):
        """Test the handler returns the value and the form."""
        result = oracle_weighted_lp(kind="monomial", param=0, p=2, mu=0.75)

        assert result["success"] is True
        assert result["value"] == pytest.approx(math.sqrt(2.0 / 3.0), rel=1e-12)
        assert result["form"]["kind"] == "monomial"

    def test_weighted_lp_bad_weight(self):
        """Test an out-of-range weight comes back as a validation error."""
        result = oracle_weighted_lp(kind="monomial", param=0, p=2, mu=0.4)

        assert result["success"] is False
        assert result["code"] == "validation"

    def test_k_brute(self):
        """Test the brute-force handler accepts scalars and lists."""
        result = oracle_k_brute(coefficients=[1.0], weights0=1.0, weights1=[2.0], t=0.25)

        assert result["success"] is True
        assert result["value"] == pytest.approx(0.5)
