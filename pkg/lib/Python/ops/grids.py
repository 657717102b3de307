"""
aniso Grids - graded time grids, periodic spatial grids and sampled data.

Time grids use the composite midpoint rule on cells [e_i, e_{i+1}], so the
nodes never touch the singular end point t = 0. Geometric grading packs
boundary layers into (0, T/100) where the weight t^{p(1-mu)} and the trace
formulas concentrate their error.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from utils.error_handling import GridResolutionError, ValidationError, require
from utils.general import log_debug
from utils.validation import validate_strictly_increasing

DEFAULT_GRADING_RATIO = 0.7
DEFAULT_BOUNDARY_LAYERS = 12
BOUNDARY_FRACTION = 0.01
MIN_NODES = 8
WEIGHT_SUM_RTOL = 1e-12
# Cells that must stay uniform after the boundary layers are placed
MIN_UNIFORM_CELLS = 3

FINITE = "finite"
HALF_LINE = "half_line"
PERIODIC = "periodic"
DOMAIN_KINDS = (FINITE, HALF_LINE, PERIODIC)

UNIFORM = "uniform"
GEOMETRIC = "geometric"
COMPOSITE = "composite"


def _frozen_array(values, dtype=float) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.flags.writeable = False
    return array


# ============================================================================
# Parameter types
# ============================================================================


@dataclass(frozen=True)
class WeightParams:
    """Integrability exponent p and weight parameter mu of L_{p,mu}."""

    p: float
    mu: float

    def __post_init__(self):
        require(
            isinstance(self.p, (int, float)) and 1.0 < self.p < math.inf,
            f"p must satisfy 1 < p < inf, got {self.p}",
            "WeightParams",
        )
        require(
            isinstance(self.mu, (int, float)) and 1.0 / self.p < self.mu <= 1.0,
            f"mu must satisfy 1/p < mu <= 1, got mu={self.mu} with p={self.p}",
            "WeightParams",
        )
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "mu", float(self.mu))

    @property
    def trace_limit(self) -> float:
        """Limit number 1 - mu + 1/p, in [1/p, 1)."""
        return 1.0 - self.mu + 1.0 / self.p

    @property
    def weight_exponent(self) -> float:
        return self.p * (1.0 - self.mu)

    def weight(self, t) -> np.ndarray:
        return np.power(np.asarray(t, dtype=float), self.weight_exponent)

    def unweighted(self) -> "WeightParams":
        return WeightParams(self.p, 1.0)

    def limit_order(self, s: float, tol: float = 1e-12) -> Optional[int]:
        """k when s = k + trace_limit (an excluded limit case), else None."""
        k = round(s - self.trace_limit)
        if k >= 0 and abs(s - (k + self.trace_limit)) < tol:
            return int(k)
        return None

    def trace_count(self, s: float) -> int:
        """Number of derivatives j with j < s - trace_limit (traces that must vanish)."""
        gap = s - self.trace_limit
        return max(0, int(math.ceil(gap))) if gap > 0 else 0

    def cache_key(self):
        return {"p": self.p, "mu": self.mu}


@dataclass(frozen=True)
class TimeDomain:
    """(0, T), a truncated half-line (0, T_trunc), or a period interval."""

    kind: str
    T: float

    def __post_init__(self):
        require(self.kind in DOMAIN_KINDS, f"unknown domain kind '{self.kind}'", "TimeDomain")
        require(
            isinstance(self.T, (int, float)) and 0.0 < self.T < math.inf,
            f"T must be positive and finite, got {self.T}",
            "TimeDomain",
        )
        object.__setattr__(self, "T", float(self.T))

    @classmethod
    def finite(cls, T: float) -> "TimeDomain":
        return cls(FINITE, T)

    @classmethod
    def half_line(cls, T_trunc: float) -> "TimeDomain":
        return cls(HALF_LINE, T_trunc)

    @classmethod
    def periodic(cls, T: float) -> "TimeDomain":
        return cls(PERIODIC, T)

    @property
    def is_truncated(self) -> bool:
        return self.kind == HALF_LINE

    @property
    def is_periodic(self) -> bool:
        return self.kind == PERIODIC

    def scaled(self, T: float) -> "TimeDomain":
        return TimeDomain(self.kind, T)

    def describe(self) -> dict:
        info = {"kind": self.kind, "T": self.T}
        if self.is_truncated:
            info["truncation"] = self.T
        return info

    def cache_key(self):
        return self.describe()


@dataclass(frozen=True)
class Grading:
    """Cell layout: uniform, geometric boundary layers, or inherited (composite)."""

    kind: str = GEOMETRIC
    ratio: float = DEFAULT_GRADING_RATIO
    n_boundary_layers: int = DEFAULT_BOUNDARY_LAYERS

    def __post_init__(self):
        require(self.kind in (UNIFORM, GEOMETRIC, COMPOSITE), f"unknown grading '{self.kind}'", "Grading")
        if self.kind == GEOMETRIC:
            require(
                0.0 < self.ratio < 1.0,
                f"geometric grading ratio must lie in (0, 1), got {self.ratio}",
                "Grading",
            )
            require(
                isinstance(self.n_boundary_layers, int) and self.n_boundary_layers >= 1,
                "n_boundary_layers must be a positive integer",
                "Grading",
            )

    @classmethod
    def uniform(cls) -> "Grading":
        return cls(UNIFORM)

    @classmethod
    def geometric(cls, ratio: float = DEFAULT_GRADING_RATIO, n_boundary_layers: int = DEFAULT_BOUNDARY_LAYERS):
        return cls(GEOMETRIC, ratio, n_boundary_layers)

    def refined(self) -> "Grading":
        """Grading for the doubled grid: enough extra layers to halve the first cell."""
        if self.kind != GEOMETRIC:
            return self
        extra = int(math.ceil(math.log(0.5) / math.log(self.ratio)))
        return Grading(GEOMETRIC, self.ratio, self.n_boundary_layers + extra)

    def describe(self) -> dict:
        if self.kind == GEOMETRIC:
            return {"kind": self.kind, "ratio": self.ratio, "n_boundary_layers": self.n_boundary_layers}
        return {"kind": self.kind}


DEFAULT_GRADING = Grading.geometric()


# ============================================================================
# Time grids and sampled functions
# ============================================================================


@dataclass(frozen=True, eq=False)
class Grid1D:
    """Midpoint-rule grid: cell edges, nodes at cell midpoints, weights = widths."""

    domain: TimeDomain
    edges: np.ndarray
    grading: Grading = field(default=DEFAULT_GRADING)
    nodes: np.ndarray = field(init=False)
    quad_weights: np.ndarray = field(init=False)

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=float)
        T = self.domain.T
        require(edges.ndim == 1 and edges.size >= 2, "grid needs at least one cell", "Grid1D")
        require(edges[0] == 0.0, "first edge must be 0", "Grid1D")
        require(np.all(np.diff(edges) > 0.0), "edges must be strictly increasing", "Grid1D")
        require(abs(edges[-1] - T) <= WEIGHT_SUM_RTOL * T, f"last edge {edges[-1]!r} must equal T={T}", "Grid1D")
        edges = edges.copy()
        edges[-1] = T
        weights = np.diff(edges)
        nodes = 0.5 * (edges[:-1] + edges[1:])
        object.__setattr__(self, "edges", _frozen_array(edges))
        object.__setattr__(self, "nodes", _frozen_array(nodes))
        object.__setattr__(self, "quad_weights", _frozen_array(weights))

    @property
    def n(self) -> int:
        return int(self.nodes.size)

    @property
    def T(self) -> float:
        return self.domain.T

    @property
    def is_uniform(self) -> bool:
        widths = self.quad_weights
        return bool(np.allclose(widths, widths[0], rtol=1e-9, atol=0.0))

    @property
    def spacing(self) -> float:
        require(self.is_uniform, "spacing is defined for uniform grids only", "Grid1D.spacing")
        return self.T / self.n

    def refine(self) -> "Grid1D":
        """Grid with twice the cells; geometric gradings also deepen the boundary layer."""
        if self.grading.kind == GEOMETRIC:
            return make_graded_grid(self.domain, 2 * self.n, self.grading.refined())
        mids = self.nodes
        edges = np.empty(2 * self.n + 1)
        edges[0::2] = self.edges
        edges[1::2] = mids
        return Grid1D(self.domain, edges, self.grading)

    def scaled(self, T: float) -> "Grid1D":
        """The same relative grid on (0, T)."""
        return Grid1D(self.domain.scaled(T), self.edges * (T / self.T), self.grading)

    def describe(self) -> dict:
        return {"n": self.n, "domain": self.domain.describe(), "grading": self.grading.describe()}

    def cache_key(self):
        return {"edges": self.edges, "domain": self.domain.describe()}


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Values in R^d at the nodes of a time grid; shape (n, d)."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        require(values.ndim == 2, "values must have shape (n,) or (n, d)", "SampledFunction")
        require(
            values.shape[0] == self.grid.n,
            f"expected {self.grid.n} values, got {values.shape[0]}",
            "SampledFunction",
        )
        require(bool(np.all(np.isfinite(values))), "values must be finite", "SampledFunction")
        object.__setattr__(self, "values", _frozen_array(values))

    @property
    def d(self) -> int:
        return int(self.values.shape[1])

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.nodes

    def with_values(self, values) -> "SampledFunction":
        return SampledFunction(self.grid, values)

    def scaled(self, factor: float) -> "SampledFunction":
        return SampledFunction(self.grid, factor * self.values)


def make_graded_grid(domain: TimeDomain, n: int, grading: Grading = DEFAULT_GRADING) -> Grid1D:
    """Build an n-cell midpoint grid on the domain.

    Geometric grading: L = n_boundary_layers cells with widths shrinking by
    `ratio` toward 0 inside (0, T/100), one innermost cell touching 0, and
    the remaining n - L - 1 cells uniform on (T/100, T).

    Args:
        domain: TimeDomain to discretize
        n: Number of cells (and nodes), at least 8
        grading: Grading spec

    Returns:
        Grid1D
    """
    require(
        isinstance(n, (int, np.integer)) and not isinstance(n, bool) and n >= MIN_NODES,
        f"n must be an integer >= {MIN_NODES}, got {n}",
        "make_graded_grid",
    )
    T = domain.T
    if domain.is_periodic:
        require(grading.kind == UNIFORM, "periodic domains need a uniform grid", "make_graded_grid")

    if grading.kind == UNIFORM:
        edges = np.linspace(0.0, T, n + 1)
    elif grading.kind == GEOMETRIC:
        layers = grading.n_boundary_layers
        if n < layers + 1 + MIN_UNIFORM_CELLS:
            raise GridResolutionError(
                f"n={n} is too small for {layers} boundary layers",
                operation="make_graded_grid",
                details={"n": n, "n_boundary_layers": layers},
            )
        a = BOUNDARY_FRACTION * T
        layer_edges = a * grading.ratio ** np.arange(layers, -1, -1, dtype=float)
        uniform_edges = np.linspace(a, T, n - layers)[1:]
        edges = np.concatenate(([0.0], layer_edges, uniform_edges))
    else:
        raise ValidationError("composite gradings are derived, not constructed", operation="make_graded_grid")

    grid = Grid1D(domain, edges, grading)
    log_debug(f"grid n={n} kind={grading.kind} first node={grid.nodes[0]:.3e}")
    return grid


def grid_from_nodes(nodes, domain_kind: str = FINITE) -> Grid1D:
    """Reconstruct a midpoint grid from its nodes (edges rebuilt from 0).

    Raises:
        ValidationError: if the nodes are not the midpoints of any partition
    """
    nodes = np.asarray(nodes, dtype=float)
    require(nodes.ndim == 1 and nodes.size >= MIN_NODES, f"need at least {MIN_NODES} nodes", "grid_from_nodes")
    check = validate_strictly_increasing("nodes", nodes)
    if not check.success:
        raise ValidationError("; ".join(check.errors), operation="grid_from_nodes")

    edges = np.empty(nodes.size + 1)
    edges[0] = 0.0
    for i, t in enumerate(nodes):
        edges[i + 1] = 2.0 * t - edges[i]
        upper = nodes[i + 1] if i + 1 < nodes.size else math.inf
        if not t < edges[i + 1] < upper:
            raise ValidationError(
                "nodes are not midpoints of a partition starting at 0",
                operation="grid_from_nodes",
                details={"index": i, "node": float(t)},
            )

    widths = np.diff(edges)
    grading = Grading.uniform() if np.allclose(widths, widths[0], rtol=1e-9) else Grading(COMPOSITE)
    if grading.kind == UNIFORM:
        edges = np.linspace(0.0, edges[-1], nodes.size + 1)
    return Grid1D(TimeDomain(domain_kind, float(edges[-1])), edges, grading)


def sample(f: Callable, grid: Grid1D, d: int = 1) -> SampledFunction:
    """Evaluate a closed-form function at the grid nodes.

    Args:
        f: Callable mapping an array of times to values of shape (n,) or (n, d)
        grid: Grid1D
        d: Value dimension

    Returns:
        SampledFunction

    Raises:
        ValidationError: if any value is non-finite
    """
    with np.errstate(all="ignore"):
        values = np.asarray(f(grid.nodes), dtype=float)
    if values.ndim == 0:
        values = np.full(grid.n, float(values))
    if values.ndim == 1:
        values = values[:, None]
    if values.shape[1] != d:
        require(values.shape[1] == 1, f"function returned {values.shape[1]} components, expected {d}", "sample")
        values = np.repeat(values, d, axis=1)
    bad = ~np.all(np.isfinite(values), axis=1)
    if np.any(bad):
        index = int(np.argmax(bad))
        raise ValidationError(
            f"non-finite value at node t={grid.nodes[index]:.6g}",
            operation="sample",
            details={"index": index},
        )
    return SampledFunction(grid, values)


def resample(u: SampledFunction, points) -> np.ndarray:
    """Cubic-spline values of u at arbitrary points.

    Points beyond T evaluate to 0 (truncated half-line convention); periodic
    domains wrap instead.
    """
    points = np.asarray(points, dtype=float)
    grid = u.grid
    if grid.domain.is_periodic:
        T = grid.T
        nodes = np.concatenate((grid.nodes - T, grid.nodes, grid.nodes + T))
        values = np.concatenate((u.values, u.values, u.values), axis=0)
        spline = CubicSpline(nodes, values, axis=0)
        return spline(np.mod(points, T))
    spline = CubicSpline(grid.nodes, u.values, axis=0, extrapolate=True)
    out = spline(points)
    out[points > grid.T] = 0.0
    return out


def extrapolate_to_zero(nodes, values, order: int = 2):
    """Lagrange extrapolation of the first order+1 samples to t = 0.

    Args:
        nodes: Sample positions (first order+1 are used)
        values: Array with the sample axis first
        order: Polynomial degree

    Returns:
        Extrapolated value(s) at 0
    """
    nodes = np.asarray(nodes, dtype=float)[: order + 1]
    values = np.asarray(values)
    if nodes.size < order + 1:
        raise GridResolutionError(
            f"extrapolation of order {order} needs {order + 1} samples",
            operation="extrapolate_to_zero",
        )
    weights = np.ones(order + 1)
    for j in range(order + 1):
        for m in range(order + 1):
            if m != j:
                weights[j] *= (0.0 - nodes[m]) / (nodes[j] - nodes[m])
    return np.tensordot(weights, values[: order + 1], axes=(0, 0))


def restrict(u: SampledFunction, T: float) -> SampledFunction:
    """Restriction of u to (0, T); T must be one of the grid's cell edges."""
    edges = u.grid.edges
    matches = np.flatnonzero(np.isclose(edges, T, rtol=1e-12, atol=0.0))
    require(matches.size == 1 and matches[0] > 0, f"T={T} is not a cell edge of the grid", "restrict")
    cut = int(matches[0])
    kind = FINITE if u.grid.domain.kind == HALF_LINE else u.grid.domain.kind
    grid = Grid1D(TimeDomain(kind, T), edges[: cut + 1], Grading(COMPOSITE))
    return SampledFunction(grid, u.values[:cut])


def mirrored_grid(grid: Grid1D) -> Grid1D:
    """Grid on the truncated half-line (0, 2T): the original cells plus their mirror images."""
    T = grid.T
    mirror = 2.0 * T - grid.edges[::-1]
    edges = np.concatenate((grid.edges, mirror[1:]))
    return Grid1D(TimeDomain.half_line(2.0 * T), edges, Grading(COMPOSITE))


# ============================================================================
# Spatial grids and space-time fields
# ============================================================================


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform periodic grid on a torus of side 2*pi*length_scale (1 or 2 axes).

    With half=True the last axis is the half-torus y in (0, y_extent) sampled
    at cell centres (j + 1/2) h; that axis is not periodic. y_extent defaults
    to pi*length_scale; on a full torus it is half the last axis period.
    """

    shape: Tuple[int, ...]
    length_scale: float = 1.0
    half: bool = False
    origin: float = 0.0
    y_extent: Optional[float] = None

    def __post_init__(self):
        shape = tuple(int(s) for s in self.shape)
        require(len(shape) in (1, 2), "spatial grids have 1 or 2 axes", "SpatialGrid")
        for size in shape:
            require(size >= 2 and size & (size - 1) == 0, f"axis sizes must be powers of two, got {shape}", "SpatialGrid")
        require(self.length_scale > 0.0, "length_scale must be positive", "SpatialGrid")
        require(self.y_extent is None or self.y_extent > 0.0, "y_extent must be positive", "SpatialGrid")
        object.__setattr__(self, "shape", shape)

    @property
    def ndim(self) -> int:
        return len(self.shape)

    @property
    def period(self) -> float:
        return 2.0 * math.pi * self.length_scale

    def axis_period(self, axis: int) -> float:
        if axis == self.ndim - 1 and self.y_extent is not None:
            return 2.0 * self.y_extent
        return self.period

    def spacing(self, axis: int) -> float:
        if self.half and axis == self.ndim - 1:
            return 0.5 * self.axis_period(axis) / self.shape[axis]
        return self.axis_period(axis) / self.shape[axis]

    @property
    def cell_volume(self) -> float:
        return float(np.prod([self.spacing(i) for i in range(self.ndim)]))

    def axis_nodes(self, axis: int) -> np.ndarray:
        h = self.spacing(axis)
        if self.half and axis == self.ndim - 1:
            return (np.arange(self.shape[axis]) + 0.5) * h
        if axis == self.ndim - 1:
            return self.origin + np.arange(self.shape[axis]) * h
        return np.arange(self.shape[axis]) * h

    def wavenumbers(self, axis: int) -> np.ndarray:
        require(not (self.half and axis == self.ndim - 1), "half-torus axis has no Fourier basis", "wavenumbers")
        return 2.0 * math.pi * np.fft.fftfreq(self.shape[axis], d=self.spacing(axis))

    def full(self) -> "SpatialGrid":
        """Full torus obtained by reflecting the half-torus axis across y = 0."""
        require(self.half, "grid is already a full torus", "SpatialGrid.full")
        shape = self.shape[:-1] + (2 * self.shape[-1],)
        h = self.spacing(self.ndim - 1)
        last = self.ndim - 1
        return SpatialGrid(shape, self.length_scale, False, -0.5 * self.axis_period(last) + 0.5 * h, self.y_extent)

    def boundary(self) -> Optional["SpatialGrid"]:
        """The x' grid of the flat boundary y = 0 (None in one dimension)."""
        if self.ndim == 1:
            return None
        return SpatialGrid(self.shape[:-1], self.length_scale)

    def mesh(self):
        return np.meshgrid(*[self.axis_nodes(i) for i in range(self.ndim)], indexing="ij")

    def describe(self) -> dict:
        info = {"shape": list(self.shape), "length_scale": self.length_scale, "half": self.half}
        if self.y_extent is not None:
            info["y_extent"] = self.y_extent
        return info


@dataclass(frozen=True, eq=False)
class SpatialSample:
    """Scalar values on a SpatialGrid."""

    grid: SpatialGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        require(values.shape == self.grid.shape, f"values shape {values.shape} != grid {self.grid.shape}", "SpatialSample")
        require(bool(np.all(np.isfinite(values))), "values must be finite", "SpatialSample")
        object.__setattr__(self, "values", _frozen_array(values))

    def lp_norm(self, p: float) -> float:
        return float((np.sum(np.abs(self.values) ** p) * self.grid.cell_volume) ** (1.0 / p))


@dataclass(frozen=True, eq=False)
class SpaceTimeField:
    """Values on tgrid x xgrid; shape (nt, *xgrid.shape)."""

    tgrid: Grid1D
    xgrid: SpatialGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        expected = (self.tgrid.n,) + self.xgrid.shape
        if values.shape != expected:
            raise ValidationError(
                f"field shape {values.shape} inconsistent with grids {expected}",
                operation="SpaceTimeField",
                details={"shape": list(values.shape), "expected": list(expected)},
            )
        require(bool(np.all(np.isfinite(values))), "field values must be finite", "SpaceTimeField")
        object.__setattr__(self, "values", _frozen_array(values))

    @property
    def spatial_axes(self) -> Tuple[int, ...]:
        return tuple(range(1, 1 + self.xgrid.ndim))

    def at_time(self, index: int) -> SpatialSample:
        return SpatialSample(self.xgrid, self.values[index])

    def with_values(self, values) -> "SpaceTimeField":
        return SpaceTimeField(self.tgrid, self.xgrid, values)

    def spatial_lp(self, p: float) -> np.ndarray:
        """L_p(x) norm at every time node."""
        sums = np.sum(np.abs(self.values) ** p, axis=self.spatial_axes) * self.xgrid.cell_volume
        return sums ** (1.0 / p)


def sample_field(f: Callable, tgrid: Grid1D, xgrid: SpatialGrid) -> SpaceTimeField:
    """Evaluate f(t, x[, y]) on the tensor grid."""
    axes = [tgrid.nodes] + [xgrid.axis_nodes(i) for i in range(xgrid.ndim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    with np.errstate(all="ignore"):
        values = np.asarray(f(*mesh), dtype=float)
    values = np.broadcast_to(values, mesh[0].shape)
    if not np.all(np.isfinite(values)):
        raise ValidationError("non-finite field value", operation="sample_field")
    return SpaceTimeField(tgrid, xgrid, np.array(values))
