"""
Tests for the seeded test-function families.
"""

import numpy as np
import pytest

from ops.ensembles import (
    FieldEnsemble,
    band_limited_fields,
    build_ensemble,
    load_ensemble_dir,
    orbit_ensemble,
    periodic_boundary_data,
    refine_spatial,
    rescaled,
    standard_ensemble,
    two_resolutions,
    vanishing_ensemble,
    vanishing_power,
    witness_family,
)
from ops.grids import SpatialGrid, sample
from utils.csv_io import write_sampled_function
from utils.error_handling import UsageError, ValidationError


class TestStandardEnsemble:
    """Test the standard family."""

    def test_layout(self, uniform_grid):
        """Test smooth closed forms come first and noise fills the rest."""
        members = standard_ensemble(uniform_grid, size=20)
        names = [m.name for m in members]

        assert len(members) == 20
        assert names[0] == "one"
        assert names[15] == "gauss_80"
        assert names[16:] == ["noise_00", "noise_01", "noise_02", "noise_03"]
        assert members[0].closed_form is not None
        assert members[16].closed_form is None

    def test_deterministic_per_seed(self, uniform_grid):
        """Test the same seed gives the same noise and another seed does not."""
        first = standard_ensemble(uniform_grid, seed=3, size=18)[-1].sample()
        again = standard_ensemble(uniform_grid, seed=3, size=18)[-1].sample()
        other = standard_ensemble(uniform_grid, seed=4, size=18)[-1].sample()

        np.testing.assert_array_equal(first.values, again.values)
        assert not np.array_equal(first.values, other.values)

    def test_two_resolutions(self, uniform_grid):
        """Test closed forms are resampled exactly on the refined grid."""
        coarse, fine = two_resolutions(standard_ensemble(uniform_grid, size=2)[1])

        assert fine.grid.n == 2 * coarse.grid.n
        np.testing.assert_allclose(fine.values[:, 0], fine.nodes)

    def test_sampled_data_refines_by_spline(self, uniform_grid):
        """Test sampled members are resampled on the refined grid."""
        u = sample(lambda t: t**2, uniform_grid)

        coarse, fine = two_resolutions(u)

        assert coarse is u
        np.testing.assert_allclose(fine.values[:, 0], fine.nodes**2, atol=1e-12)

    def test_rescaled(self, uniform_grid):
        """Test dilation keeps the profile in t / T."""
        member = rescaled(standard_ensemble(uniform_grid, size=2)[1], 4.0)
        u = member.sample()

        assert member.grid.T == 4.0
        np.testing.assert_allclose(u.values[:, 0], u.nodes / 4.0)


class TestOtherFamilies:
    """Test vanishing, witness and named builders."""

    def test_vanishing_members(self, uniform_grid, unweighted):
        """Test names carry the 0_ prefix and values vanish at 0."""
        members = vanishing_ensemble(uniform_grid, unweighted, 1.0, size=4)

        assert [m.name for m in members] == ["0_one", "0_ramp", "0_square", "0_cube"]
        assert vanishing_power(unweighted, 1.0) == 2
        assert float(members[0].f(0.0)) == 0.0

    def test_witness_exponents(self, uniform_grid, weighted):
        """Test witness members sit just inside L_{p,mu}."""
        members = witness_family(uniform_grid, weighted, (0.2,))

        assert members[0].name == "witness_0.2"
        assert members[0].f.exponent == pytest.approx(-0.75 + 0.2)

    def test_build_ensemble(self, uniform_grid, unweighted):
        """Test lookup by name and its errors."""
        assert len(build_ensemble("bump", uniform_grid, size=3)) == 3
        assert len(build_ensemble("vanishing", uniform_grid, wp=unweighted, s=0.5, size=2)) == 2
        with pytest.raises(UsageError):
            build_ensemble("chaotic", uniform_grid)
        with pytest.raises(ValidationError):
            build_ensemble("vanishing", uniform_grid)


class TestEnsembleDirectory:
    """Test loading user-supplied CSV ensembles."""

    def test_loads_sorted(self, tmp_path, uniform_grid):
        """Test every CSV is read in file-name order."""
        write_sampled_function(str(tmp_path / "b.csv"), sample(lambda t: 2.0 * t, uniform_grid))
        write_sampled_function(str(tmp_path / "a.csv"), sample(lambda t: t, uniform_grid))

        members = load_ensemble_dir(str(tmp_path))

        assert len(members) == 2
        np.testing.assert_allclose(members[1].values, 2.0 * members[0].values, rtol=1e-12)

    def test_missing_and_empty(self, tmp_path):
        """Test a missing directory is a usage error and an empty one a validation error."""
        with pytest.raises(UsageError):
            load_ensemble_dir(str(tmp_path / "nowhere"))
        with pytest.raises(ValidationError):
            load_ensemble_dir(str(tmp_path))


class TestSpaceTimeFamilies:
    """Test spatial and space-time ensembles."""

    def test_orbits_start_at_data(self, uniform_grid):
        """Test orbits decay from their initial data."""
        orbits = orbit_ensemble(uniform_grid, SpatialGrid((16,)), size=2)

        name, u0, field = orbits[0]
        assert name == "orbit_00"
        assert field.values.shape == (64, 16)
        assert np.linalg.norm(field.values[-1]) <= np.linalg.norm(u0.values)

    def test_band_limited_fields(self, uniform_grid):
        """Test field shapes and names."""
        fields = band_limited_fields(uniform_grid, SpatialGrid((8, 8)), size=3)

        assert [name[-3:] for name, _ in fields] == ["x00", "x01", "x02"]
        assert fields[0][1].values.shape == (64, 8, 8)

    def test_boundary_data_needs_periodic_time(self, uniform_grid, periodic_grid):
        """Test boundary data is band-limited on a periodic time grid."""
        data = periodic_boundary_data(periodic_grid, None, size=2)

        assert [name for name, _ in data] == ["boundary_00", "boundary_01"]
        with pytest.raises(ValidationError):
            periodic_boundary_data(uniform_grid, None)

    def test_field_ensemble_refines(self, uniform_grid):
        """Test the refined family doubles every axis."""
        family = FieldEnsemble(band_limited_fields, uniform_grid, SpatialGrid((8,)))

        refined = family.refined()

        assert refined[0][1].values.shape == (128, 16)
        assert refine_spatial(SpatialGrid((4, 2), half=True)).shape == (8, 4)
        assert family.describe() == {"n_t": 64, "x_shape": [8], "seed": 0}
