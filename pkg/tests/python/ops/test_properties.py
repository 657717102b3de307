"""
Property-based tests for scaling laws and predicate monotonicity.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis.strategies import floats

from ops.grids import Grading, TimeDomain, WeightParams, make_graded_grid, sample
from ops.interpolation import QUADRATIC_EXACT, DiagonalCouple, k_functional
from ops.norms import weighted_lp_norm
from ops.operators import phi_mu
from ops.verify import EmbeddingQuery, embeds

GRID = make_graded_grid(TimeDomain.finite(1.0), 64, Grading.geometric())
BUMP = sample(lambda t: np.exp(-t) * (1.0 + t * t), GRID)
DYADIC = DiagonalCouple(np.ones(4), np.array([1.0, 2.0, 4.0, 8.0]))
COEFFICIENTS = np.array([1.0, -0.5, 0.25, 2.0])

weights = floats(min_value=0.55, max_value=1.0)
scales = floats(min_value=-50.0, max_value=50.0).filter(lambda c: abs(c) > 1e-3)


class TestScaling:
    """Test homogeneity of norms and K-functionals."""

    @settings(max_examples=30, deadline=None)
    @given(c=scales, mu=weights)
    def test_weighted_lp_homogeneous(self, c, mu):
        """Test |c u| = |c| |u| in L_{2,mu}."""
        wp = WeightParams(2.0, mu)
        scaled = BUMP.with_values(c * BUMP.values)

        value = weighted_lp_norm(scaled, wp, estimate=False).value

        assert value == pytest.approx(abs(c) * weighted_lp_norm(BUMP, wp, estimate=False).value, rel=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(mu=weights)
    def test_phi_mu_isometry(self, mu):
        """Test Phi_mu maps L_{2,mu} onto L_2 isometrically."""
        wp = WeightParams(2.0, mu)

        image = weighted_lp_norm(phi_mu(BUMP, wp), WeightParams(2.0, 1.0), estimate=False).value

        assert image == pytest.approx(weighted_lp_norm(BUMP, wp, estimate=False).value, rel=1e-10)

    @settings(max_examples=30, deadline=None)
    @given(c=scales, t=floats(min_value=1e-3, max_value=1e3))
    def test_k_functional_homogeneous(self, c, t):
        """Test K(t, c a) = |c| K(t, a) for the quadratic K."""
        k = k_functional(COEFFICIENTS, DYADIC, t, QUADRATIC_EXACT)

        assert k_functional(c * COEFFICIENTS, DYADIC, t, QUADRATIC_EXACT) == pytest.approx(abs(c) * k, rel=1e-9)


class TestPredicates:
    """Test the embedding predicate is monotone in the source order."""

    @settings(max_examples=50, deadline=None)
    @given(mu=weights, s=floats(min_value=0.1, max_value=3.0), gain=floats(min_value=0.0, max_value=2.0))
    def test_embeds_monotone_in_s(self, mu, s, gain):
        """Test raising s never breaks an embedding."""
        lower = EmbeddingQuery(2.0, 4.0, mu, s, 0.05)
        higher = EmbeddingQuery(2.0, 4.0, mu, s + gain, 0.05)

        if embeds(lower):
            assert embeds(higher)
