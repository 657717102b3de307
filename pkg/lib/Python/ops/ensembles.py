"""
aniso Ensembles - deterministic test-function families for the verification suites.

Every builder is a pure function of (grid, seed): members are closed forms
scaled to the grid's T, plus band-limited noise drawn from a seeded
generator, so reports never depend on global random state.
"""

import glob
import math
import os
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np

from ops.grids import (
    DEFAULT_GRADING,
    Grading,
    Grid1D,
    SampledFunction,
    SpaceTimeField,
    SpatialGrid,
    SpatialSample,
    TimeDomain,
    WeightParams,
    make_graded_grid,
    resample,
    sample,
    sample_field,
)
from ops.operators import trace_rightinverse_S
from ops.oracle import ClosedForm
from ops.spectral import smooth_cutoff
from utils.csv_io import read_sampled_function
from utils.error_handling import UsageError, ValidationError, require
from utils.general import log_debug

ENSEMBLE_SIZE = 32
DEFAULT_N = 256
NOISE_MODES = 8
SPATIAL_MODES = 4
BUMP_WIDTH = 0.06


# ============================================================================
# Members
# ============================================================================


@dataclass(frozen=True, eq=False)
class EnsembleMember:
    """A named closed-form function bound to the grid it is measured on."""

    name: str
    f: Callable
    grid: Grid1D

    @property
    def closed_form(self) -> Optional[ClosedForm]:
        return self.f if isinstance(self.f, ClosedForm) else None

    def sample(self) -> SampledFunction:
        return sample(self.f, self.grid)

    def refined(self) -> SampledFunction:
        return sample(self.f, self.grid.refine())

    def on(self, grid: Grid1D) -> "EnsembleMember":
        return EnsembleMember(self.name, self.f, grid)


Member = Union[EnsembleMember, SampledFunction]


def member_name(member: Member, index: int) -> str:
    return getattr(member, "name", f"u{index}")


def realize(member: Member) -> SampledFunction:
    return member if isinstance(member, SampledFunction) else member.sample()


def two_resolutions(member: Member) -> Tuple[SampledFunction, SampledFunction]:
    """The member on its grid and on the refined grid.

    Sampled data has no closed form, so its refinement is a spline resample.
    """
    if isinstance(member, SampledFunction):
        fine = member.grid.refine()
        return member, SampledFunction(fine, resample(member, fine.nodes))
    return member.sample(), member.refined()


def default_grid(T: float = 1.0, n: int = DEFAULT_N, grading: Grading = DEFAULT_GRADING) -> Grid1D:
    return make_graded_grid(TimeDomain.finite(T), n, grading)


# ============================================================================
# Callables
# ============================================================================


@dataclass(frozen=True, eq=False)
class BandLimited:
    """sum_k a_k cos(k pi t / T + phi_k)."""

    amplitudes: np.ndarray
    phases: np.ndarray
    T: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        k = np.arange(1, self.amplitudes.size + 1)
        return np.cos(np.multiply.outer(t, k) * math.pi / self.T + self.phases) @ self.amplitudes


@dataclass(frozen=True, eq=False)
class Vanishing:
    """base(t) * (t / T)^power: every trace of order < power vanishes."""

    base: Callable
    power: int
    T: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.base(t) * (t / self.T) ** self.power


@dataclass(frozen=True, eq=False)
class Witness:
    """t^exponent times a cutoff that is 1 on (0, T/2] and 0 from 9T/10 on."""

    exponent: float
    T: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.power(t, self.exponent) * smooth_cutoff(t, 0.5 * self.T, 0.9 * self.T)


@dataclass(frozen=True, eq=False)
class Rescaled:
    """f(factor * t): the same profile on a dilated interval."""

    base: Callable
    factor: float

    def __call__(self, t):
        return self.base(self.factor * np.asarray(t, dtype=float))


def rescaled(member: EnsembleMember, T: float) -> EnsembleMember:
    """The member dilated from (0, member.grid.T) to (0, T) on the scaled grid."""
    return EnsembleMember(member.name, Rescaled(member.f, member.grid.T / T), member.grid.scaled(T))


def _band_limited(rng: np.random.Generator, T: float, modes: int = NOISE_MODES) -> BandLimited:
    k = np.arange(1, modes + 1)
    amplitudes = rng.standard_normal(modes) / k**2
    phases = rng.uniform(0.0, 2.0 * math.pi, modes)
    return BandLimited(amplitudes, phases, T)


def _gaussian(center: float, width: float, T: float) -> ClosedForm:
    return ClosedForm.gaussian(1.0 / (width * T) ** 2, center=center * T)


def smooth_members(T: float) -> List[Tuple[str, Callable]]:
    """Closed forms in t / T: monomials, exponentials, trig and Gaussians."""
    two_pi = 2.0 * math.pi
    return [
        ("one", ClosedForm.monomial(0.0)),
        ("ramp", ClosedForm.monomial(1.0, 1.0 / T)),
        ("square", ClosedForm.monomial(2.0, T**-2)),
        ("cube", ClosedForm.monomial(3.0, T**-3)),
        ("exp_decay", ClosedForm.exponential(1.0 / T)),
        ("exp_fast", ClosedForm.exponential(3.0 / T)),
        ("exp_growth", ClosedForm.exponential(-0.5 / T)),
        ("sin_period", ClosedForm.trig(two_pi / T)),
        ("cos_period", ClosedForm.trig(two_pi / T, phase=0.5 * math.pi)),
        ("sin_5", ClosedForm.trig(5.0 / T)),
        ("cos_3", ClosedForm.trig(3.0 / T, phase=0.5 * math.pi)),
        ("gauss_20", _gaussian(0.2, 0.10, T)),
        ("gauss_40", _gaussian(0.4, 0.15, T)),
        ("gauss_50", _gaussian(0.5, 0.10, T)),
        ("gauss_60", _gaussian(0.6, 0.20, T)),
        ("gauss_80", _gaussian(0.8, 0.12, T)),
    ]


# ============================================================================
# Time ensembles
# ============================================================================


def standard_ensemble(grid: Grid1D, seed: int = 0, size: int = ENSEMBLE_SIZE) -> List[EnsembleMember]:
    """Smooth closed forms followed by seeded band-limited noise, size members in total."""
    require(size >= 1, "ensemble size must be >= 1", "standard_ensemble")
    T = grid.T
    members = [EnsembleMember(name, f, grid) for name, f in smooth_members(T)][:size]
    rng = np.random.default_rng(seed)
    index = 0
    while len(members) < size:
        members.append(EnsembleMember(f"noise_{index:02d}", _band_limited(rng, T), grid))
        index += 1
    log_debug(f"standard ensemble: {len(members)} members, seed={seed}, n={grid.n}")
    return members


def vanishing_power(wp: WeightParams, s: float) -> int:
    """Smallest power of t / T leaving every trace required by W0^s at zero, with one to spare."""
    return wp.trace_count(s) + 1


def vanishing_ensemble(
    grid: Grid1D, wp: WeightParams, s: float, seed: int = 0, size: int = ENSEMBLE_SIZE
) -> List[EnsembleMember]:
    """Standard members times (t / T)^power so that they lie in the vanishing-trace space."""
    power = vanishing_power(wp, s)
    return [
        EnsembleMember(f"0_{member.name}", Vanishing(member.f, power, grid.T), grid)
        for member in standard_ensemble(grid, seed, size)
    ]


def bump_ensemble(grid: Grid1D, seed: int = 0, size: int = 8) -> List[EnsembleMember]:
    """Narrow Gaussians centred in (0.3 T, 0.7 T); negligible near both end points."""
    T = grid.T
    rng = np.random.default_rng(seed)
    centers = np.linspace(0.3, 0.7, size)
    widths = BUMP_WIDTH * (1.0 + 0.3 * rng.uniform(0.0, 1.0, size))
    return [
        EnsembleMember(f"bump_{i:02d}", _gaussian(float(c), float(w), T), grid)
        for i, (c, w) in enumerate(zip(centers, widths))
    ]


def gaussian_ensemble(grid: Grid1D, seed: int = 0, size: int = 8) -> List[EnsembleMember]:
    """Wide Gaussians with nonzero values at t = 0 (trace-formula rates)."""
    T = grid.T
    rng = np.random.default_rng(seed)
    centers = rng.uniform(-0.2, 0.4, size)
    widths = rng.uniform(0.2, 0.5, size)
    return [
        EnsembleMember(f"gauss_{i:02d}", _gaussian(float(c), float(w), T), grid)
        for i, (c, w) in enumerate(zip(centers, widths))
    ]


def witness_family(grid: Grid1D, wp: WeightParams, eps_values=(0.4, 0.2, 0.1, 0.05)) -> List[EnsembleMember]:
    """u_eps(t) = t^{-(1 - mu + 1/p) + eps} times a cutoff; norms blow up as eps -> 0."""
    members = []
    for eps in eps_values:
        require(eps > 0.0, "witness eps must be positive", "witness_family")
        exponent = -wp.trace_limit + eps
        members.append(EnsembleMember(f"witness_{eps:g}", Witness(exponent, grid.T), grid))
    return members


ENSEMBLE_BUILDERS: Dict[str, Callable[..., List[EnsembleMember]]] = {
    "standard": standard_ensemble,
    "bump": bump_ensemble,
    "gaussian": gaussian_ensemble,
}


def build_ensemble(
    name: str, grid: Grid1D, seed: int = 0, wp: Optional[WeightParams] = None, s: float = 0.0, size: Optional[int] = None
) -> List[EnsembleMember]:
    """Ensemble by name; "vanishing" needs wp and s."""
    if name == "vanishing":
        require(wp is not None, "the vanishing ensemble needs weight parameters", "build_ensemble")
        return vanishing_ensemble(grid, wp, s, seed, size or ENSEMBLE_SIZE)
    if name not in ENSEMBLE_BUILDERS:
        raise UsageError(
            f"unknown ensemble '{name}'",
            operation="build_ensemble",
            details={"known": sorted(list(ENSEMBLE_BUILDERS) + ["vanishing"])},
        )
    builder = ENSEMBLE_BUILDERS[name]
    return builder(grid, seed) if size is None else builder(grid, seed, size)


def load_ensemble_dir(path: str, domain_kind: str = "finite") -> List[SampledFunction]:
    """Every *.csv in path (sorted by file name) as a SampledFunction."""
    if not os.path.isdir(path):
        raise UsageError(f"ensemble directory not found: {path}", operation="load_ensemble_dir")
    files = sorted(glob.glob(os.path.join(path, "*.csv")))
    if not files:
        raise ValidationError(f"no CSV files in {path}", operation="load_ensemble_dir")
    return [read_sampled_function(name, domain_kind) for name in files]


# ============================================================================
# Spatial and space-time ensembles
# ============================================================================


def band_limited_sample(xgrid: SpatialGrid, rng: np.random.Generator, modes: int = SPATIAL_MODES) -> SpatialSample:
    """Random trigonometric polynomial with wavenumbers |k_i| <= modes (in units of 1/L)."""
    require(not xgrid.half, "band-limited samples live on a full torus", "band_limited_sample")
    mesh = xgrid.mesh()
    values = np.zeros(xgrid.shape)
    for _ in range(modes):
        k = rng.integers(-modes, modes + 1, size=xgrid.ndim)
        phase = rng.uniform(0.0, 2.0 * math.pi)
        amplitude = rng.standard_normal() / (1.0 + float(np.dot(k, k)))
        argument = sum(ki * x / xgrid.length_scale for ki, x in zip(k, mesh))
        values += amplitude * np.cos(argument + phase)
    return SpatialSample(xgrid, values)


def orbit_ensemble(
    tgrid: Grid1D, xgrid: SpatialGrid, m: int = 1, seed: int = 0, size: int = 4
) -> List[Tuple[str, SpatialSample, SpaceTimeField]]:
    """Semigroup orbits exp(-t (1 - Laplacian)^m) u0 of band-limited u0."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(size):
        u0 = band_limited_sample(xgrid, rng)
        out.append((f"orbit_{i:02d}", u0, trace_rightinverse_S(u0, m, tgrid)))
    return out


def band_limited_fields(tgrid: Grid1D, xgrid: SpatialGrid, seed: int = 0, size: int = 8) -> List[Tuple[str, SpaceTimeField]]:
    """g(t) * v(x): smooth closed forms in time times band-limited spatial data."""
    rng = np.random.default_rng(seed)
    smooth = smooth_members(tgrid.T)
    out = []
    for i in range(size):
        name, g = smooth[(3 * i + 4) % len(smooth)]
        spatial = band_limited_sample(xgrid, rng).values
        time_values = np.asarray(g(tgrid.nodes), dtype=float).reshape((-1,) + (1,) * xgrid.ndim)
        out.append((f"{name}_x{i:02d}", SpaceTimeField(tgrid, xgrid, time_values * spatial[None, ...])))
    return out


def periodic_boundary_data(
    tgrid: Grid1D, boundary: Optional[SpatialGrid], seed: int = 0, size: int = 4, modes: int = SPATIAL_MODES
) -> List[Tuple[str, Union[SampledFunction, SpaceTimeField]]]:
    """Band-limited data on a periodic time grid, times band-limited x' data when a boundary grid is given."""
    require(tgrid.domain.is_periodic, "boundary data needs a periodic time grid", "periodic_boundary_data")
    rng = np.random.default_rng(seed)
    T = tgrid.T
    out = []
    for i in range(size):
        j = rng.integers(1, modes + 1, size=2)
        phases = rng.uniform(0.0, 2.0 * math.pi, 2)
        amplitudes = rng.standard_normal(2)

        def g(t, j=j, phases=phases, amplitudes=amplitudes):
            return sum(a * np.cos(2.0 * math.pi * jj * t / T + ph) for a, jj, ph in zip(amplitudes, j, phases))

        if boundary is None:
            out.append((f"boundary_{i:02d}", sample(g, tgrid)))
            continue
        spatial = band_limited_sample(boundary, rng).values
        field = sample_field(lambda t, x, g=g: g(t) + 0.0 * x, tgrid, boundary)
        out.append((f"boundary_{i:02d}", field.with_values(field.values * spatial[None, :])))
    return out


def refine_spatial(xgrid: SpatialGrid) -> SpatialGrid:
    """Twice the points on every axis of the same torus (or half-torus)."""
    shape = tuple(2 * size for size in xgrid.shape)
    return SpatialGrid(shape, xgrid.length_scale, xgrid.half, xgrid.origin, xgrid.y_extent)


@dataclass(frozen=True, eq=False)
class FieldEnsemble:
    """A seeded space-time family that can be rebuilt on refined grids.

    builder(tgrid, xgrid, seed) returns a list of tuples whose first entry
    is the member name; the same seed on refined grids gives the same
    continuous members.
    """

    builder: Callable
    tgrid: Grid1D
    xgrid: SpatialGrid
    seed: int = 0

    def members(self) -> list:
        return self.builder(self.tgrid, self.xgrid, self.seed)

    def refined(self) -> list:
        return self.builder(self.tgrid.refine(), refine_spatial(self.xgrid), self.seed)

    def describe(self) -> dict:
        return {"n_t": self.tgrid.n, "x_shape": list(self.xgrid.shape), "seed": self.seed}
