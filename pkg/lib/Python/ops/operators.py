"""
aniso Operators - weight isomorphism, extensions, translations, fractional
powers, traces and their right-inverses.

Fractional powers are Fourier multipliers: time data goes through the
periodization in ops.spectral, spatial data lives on a torus already.
"""

import math
from dataclasses import dataclass
from typing import Dict, Union

import numpy as np
from scipy.interpolate import CubicSpline

from ops import spectral
from ops.grids import (
    Grid1D,
    SampledFunction,
    SpaceTimeField,
    SpatialGrid,
    SpatialSample,
    WeightParams,
    extrapolate_to_zero,
    mirrored_grid,
    resample,
)
from ops.norms import finite_difference, weighted_lp_norm
from utils.error_handling import (
    BranchCutError,
    GridResolutionError,
    IntegerRule,
    NumericRangeRule,
    ValidationError,
    handle_numeric_errors,
    require,
    validate_inputs,
)
from utils.general import log_debug

TIME_DERIV_MINUS = "time_deriv_minus"
TIME_DERIV_PLUS = "time_deriv_plus"
LAPLACIAN = "laplacian"
OPERATOR_KINDS = (TIME_DERIV_MINUS, TIME_DERIV_PLUS, LAPLACIAN)
TIME_KINDS = (TIME_DERIV_MINUS, TIME_DERIV_PLUS)

FORWARD = "forward"
INVERSE = "inverse"

MAX_TIME_ORDER = 2.0
MAX_EXTENSION_ORDER = spectral.MAX_REFLECTION_ORDER
# Relative size of the mean below which a zero mode counts as absent
ZERO_MODE_TOL = 1e-12
MIN_TRACE_LAYERS = 3
# Layer spacing at which quadratic extrapolation to y = 0 recovers the data
RIGHT_INVERSE_Y_SPACING = 1e-3


# ============================================================================
# Operator specs
# ============================================================================


@dataclass(frozen=True)
class FractionalOperatorSpec:
    """(shift - d/dt)^order, (shift + d/dt)^order or (shift - Laplacian)^order.

    Time orders lie in [0, 2), Laplacian orders are >= 0; order 0 is the identity.
    """

    kind: str
    order: float
    shift: float = 1.0

    def __post_init__(self):
        require(self.kind in OPERATOR_KINDS, f"unknown operator kind '{self.kind}'", "FractionalOperatorSpec")
        require(math.isfinite(self.order) and math.isfinite(self.shift), "order and shift must be finite", "FractionalOperatorSpec")
        require(self.shift >= 0.0, f"shift must be >= 0, got {self.shift}", "FractionalOperatorSpec")
        if self.kind in TIME_KINDS:
            require(
                0.0 <= self.order < MAX_TIME_ORDER,
                f"time orders must lie in [0, 2), got {self.order}",
                "FractionalOperatorSpec",
            )
        else:
            require(self.order >= 0.0, f"Laplacian order must be >= 0, got {self.order}", "FractionalOperatorSpec")

    @property
    def is_time(self) -> bool:
        return self.kind in TIME_KINDS

    def symbol(self, xi) -> np.ndarray:
        """Multiplier at time frequencies xi, or at |xi|^2 for the Laplacian."""
        if self.kind == TIME_DERIV_MINUS:
            return spectral.time_deriv_minus_symbol(xi, self.order, self.shift)
        if self.kind == TIME_DERIV_PLUS:
            return spectral.time_deriv_plus_symbol(xi, self.order, self.shift)
        return spectral.laplacian_symbol(xi, self.order, self.shift)

    def with_order(self, order: float) -> "FractionalOperatorSpec":
        return FractionalOperatorSpec(self.kind, order, self.shift)

    def describe(self) -> Dict[str, object]:
        return {"kind": self.kind, "order": self.order, "shift": self.shift}


@dataclass(frozen=True)
class SumOperatorSpec:
    """L = (shift' - d/dt)^alpha + (shift - Laplacian)^order."""

    time: FractionalOperatorSpec
    space: FractionalOperatorSpec

    def __post_init__(self):
        require(self.time.kind == TIME_DERIV_MINUS, "time part of L must be time_deriv_minus", "SumOperatorSpec")
        require(self.space.kind == LAPLACIAN, "space part of L must be laplacian", "SumOperatorSpec")
        require(
            self.time.shift + self.space.shift != 0.0,
            "shifts of the time and space parts must not both vanish",
            "SumOperatorSpec",
        )

    @classmethod
    def parabolic(cls, m: int = 1, time_shift: float = 1.0, space_shift: float = 0.0) -> "SumOperatorSpec":
        """1 - d/dt + (-Laplacian)^m and its shifted variants."""
        return cls(FractionalOperatorSpec(TIME_DERIV_MINUS, 1.0, time_shift), FractionalOperatorSpec(LAPLACIAN, m, space_shift))

    def symbol(self, xi_t, xi_squared) -> np.ndarray:
        return self.time.symbol(xi_t) + self.space.symbol(xi_squared)


# ============================================================================
# Weight isomorphism, extensions, translation
# ============================================================================


def phi_mu(u: SampledFunction, wp: WeightParams, direction: str = FORWARD) -> SampledFunction:
    """Multiply by t^{1-mu} (forward) or t^{-(1-mu)} (inverse)."""
    require(direction in (FORWARD, INVERSE), f"direction must be '{FORWARD}' or '{INVERSE}'", "phi_mu")
    exponent = 1.0 - wp.mu if direction == FORWARD else wp.mu - 1.0
    if exponent == 0.0:
        return u.with_values(u.values)
    return u.with_values(u.values * np.power(u.nodes, exponent)[:, None])


def _psi(tau, T: float) -> np.ndarray:
    return tau * (2.0 * T - tau) / (T * T)


def evaluate_extend_zero(u: SampledFunction, wp: WeightParams, t) -> np.ndarray:
    """Values of the vanishing-trace extension at arbitrary points t.

    u(t) on (0, T); 3 (psi^{1-mu} u)(2T - t) - 2 (psi^{1-mu} u)(3T - 2t) on
    [T, 2T), the second term only up to 3T/2; zero from 2T on.
    """
    T = u.grid.T
    t = np.atleast_1d(np.asarray(t, dtype=float))
    a = 1.0 - wp.mu
    out = np.zeros((t.size, u.d))
    inside = t < T
    out[inside] = resample(u, t[inside])

    tail = (t >= T) & (t < 2.0 * T)
    first = 2.0 * T - t[tail]
    out[tail] = 3.0 * (_psi(first, T) ** a)[:, None] * resample(u, first)

    near = tail & (t <= 1.5 * T)
    second = 3.0 * T - 2.0 * t[near]
    out[near] -= 2.0 * (_psi(second, T) ** a)[:, None] * resample(u, second)
    return out


def extend_zero(u: SampledFunction, wp: WeightParams) -> SampledFunction:
    """Extension from (0, T) to (0, 2T) preserving vanishing traces, on the mirrored grid.

    The first term uses the node values directly (the mirrored nodes are
    2T - t_j); the second term resamples u at 2 t_j - T.
    """
    T = u.grid.T
    grid = mirrored_grid(u.grid)
    a = 1.0 - wp.mu
    nodes = u.nodes
    mirror = 3.0 * (_psi(nodes, T) ** a)[:, None] * u.values

    second_points = 2.0 * nodes - T
    active = second_points > 0.0
    correction = np.zeros_like(mirror)
    correction[active] = 2.0 * (_psi(second_points[active], T) ** a)[:, None] * resample(u, second_points[active])
    outer = (mirror - correction)[::-1]
    return SampledFunction(grid, np.concatenate((u.values, outer), axis=0))


@validate_inputs({"k": [IntegerRule(min_val=0, max_val=MAX_EXTENSION_ORDER)]})
def extend_general(u: SampledFunction, k: int = spectral.PERIODIZATION_ORDER) -> SampledFunction:
    """Order-k reflection times a smooth cutoff, on the mirrored grid over (0, 2T).

    Values beyond T depend on u over (T/2, T) only and vanish from
    T + T/(2k+2) on.

    Raises:
        GridResolutionError: fewer than 2(k+1) nodes in (T/2, T)
    """
    grid = mirrored_grid(u.grid)
    outer_nodes = grid.nodes[u.grid.n :]
    outer = spectral.reflect_beyond(u, outer_nodes, k)
    return SampledFunction(grid, np.concatenate((u.values, outer), axis=0))


@validate_inputs({"k": [IntegerRule(min_val=0, max_val=MAX_EXTENSION_ORDER)]})
def extend_spatial(u: SpatialSample, k: int = 0) -> SpatialSample:
    """Extend data on the half-torus y > 0 across y = 0 to the full torus.

    k = 0 is the even reflection. For k >= 1 the order-k reflection
    sum_j lambda_j u(j y) is blended into the even reflection by a cutoff
    equal to 1 for y <= Y/(4(k+1)) and 0 for y >= Y/(2(k+1)), Y = y_extent,
    so constants stay constant and the reflection never leaves (0, Y/2].

    Raises:
        GridResolutionError: fewer than 2(k+1) layers under the cutoff
    """
    grid = u.grid
    require(grid.half, "extend_spatial needs data on a half-torus", "extend_spatial")
    y = grid.axis_nodes(grid.ndim - 1)
    values = np.array(u.values)
    even = values[..., ::-1]
    if k == 0:
        extended = np.concatenate((even, values), axis=-1)
        return SpatialSample(grid.full(), extended)

    extent = 0.5 * grid.axis_period(grid.ndim - 1)
    start, end = extent / (4.0 * (k + 1)), extent / (2.0 * (k + 1))
    if np.count_nonzero(y < end) < 2 * (k + 1):
        raise GridResolutionError(
            f"half-torus too coarse for order-{k} reflection",
            operation="extend_spatial",
            details={"k": k, "layers": int(y.size)},
        )
    spline = CubicSpline(y, values, axis=-1, extrapolate=True)
    cutoff = spectral.smooth_cutoff(y, start, end)
    active = cutoff > 0.0
    reflected = np.zeros_like(values)
    for j, lam in enumerate(spectral.reflection_coefficients(k), start=1):
        reflected[..., active] += lam * spline(j * y[active])
    blended = cutoff * reflected + (1.0 - cutoff) * values
    extended = np.concatenate((blended[..., ::-1], values), axis=-1)
    return SpatialSample(grid.full(), extended)


def restrict_spatial(u: SpatialSample, half_grid: SpatialGrid) -> SpatialSample:
    """Restriction of full-torus data to the half-torus y > 0."""
    n_half = half_grid.shape[-1]
    return SpatialSample(half_grid, u.values[..., n_half:])


@validate_inputs({"t0": [NumericRangeRule(0.0, None)]})
def translate(u: SampledFunction, t0: float) -> SampledFunction:
    """(Lambda_{t0} u)(tau) = u(tau + t0), zero where tau + t0 > T."""
    if t0 == 0.0:
        return u.with_values(u.values)
    return u.with_values(resample(u, u.nodes + t0))


def generator_residual(u: SampledFunction, h: float, wp: WeightParams) -> float:
    """|(Lambda_h u - u)/h - u'|_{L_{p,mu}} over the nodes with tau + h <= T."""
    require(h > 0.0, "h must be positive", "generator_residual")
    quotient = (translate(u, h).values - u.values) / h
    derivative = finite_difference(u, 1).values
    keep = u.nodes + h <= u.grid.T
    residual = np.where(keep[:, None], quotient - derivative, 0.0)
    return weighted_lp_norm(u.with_values(residual), wp, estimate=False).value


# ============================================================================
# Fractional powers
# ============================================================================


def _check_branch(signal_values: np.ndarray, spec: FractionalOperatorSpec) -> None:
    if not spec.is_time or spec.shift != 0.0 or float(spec.order).is_integer():
        return
    coefficients = np.fft.fft(signal_values, axis=0)
    scale = float(np.max(np.abs(coefficients))) if coefficients.size else 0.0
    if scale > 0.0 and float(np.max(np.abs(coefficients[0]))) > ZERO_MODE_TOL * scale:
        raise BranchCutError(
            "shift 0 with a nonzero mean: the fractional power is evaluated at the branch point",
            operation="fractional_apply",
            details=spec.describe(),
        )


@handle_numeric_errors("fractional_apply")
def fractional_apply(
    u: Union[SampledFunction, SpatialSample, SpaceTimeField], spec: FractionalOperatorSpec
) -> Union[SampledFunction, SpatialSample, SpaceTimeField]:
    """Apply the Fourier multiplier of spec mode-wise.

    Time kinds act on SampledFunction data (periodized unless the domain is
    periodic). The Laplacian acts on spatial samples, on the spatial axes of a
    field, or on time data as (shift - d^2/dt^2)^order.

    Raises:
        BranchCutError: shift 0, noninteger order and a nonzero zero mode
    """
    if spec.order == 0.0:
        return u.with_values(u.values) if not isinstance(u, SpatialSample) else SpatialSample(u.grid, u.values)

    if isinstance(u, SampledFunction):
        signal = spectral.periodize(u)
        _check_branch(signal.values, spec)
        xi = signal.frequencies()
        symbol = spec.symbol(xi) if spec.is_time else spec.symbol(xi * xi)
        return u.with_values(spectral.unperiodize(signal, spectral.apply_time_symbol(signal.values, symbol)))

    require(not spec.is_time, "time operators act on SampledFunction data", "fractional_apply")
    if isinstance(u, SpatialSample):
        require(not u.grid.half, "spatial multipliers need a full torus", "fractional_apply")
        symbol = spec.symbol(spectral.xi_squared(u.grid))
        return SpatialSample(u.grid, spectral.apply_spatial_symbol(u.values, u.grid, symbol))
    require(not u.xgrid.half, "spatial multipliers need a full torus", "fractional_apply")
    symbol = spec.symbol(spectral.xi_squared(u.xgrid))
    return u.with_values(spectral.apply_spatial_symbol(u.values, u.xgrid, symbol, first_axis=1))


@validate_inputs({"axis": [IntegerRule(min_val=0, max_val=1)]})
def spatial_derivative(u: SpaceTimeField, axis: int) -> SpaceTimeField:
    """d/dx_axis as multiplication by i xi_axis."""
    require(axis < u.xgrid.ndim, f"axis {axis} out of range for a {u.xgrid.ndim}-D grid", "spatial_derivative")
    require(not u.xgrid.half, "spatial derivatives need a full torus", "spatial_derivative")
    symbol = 1j * spectral.wavenumber_mesh(u.xgrid)[axis]
    return u.with_values(spectral.apply_spatial_symbol(u.values, u.xgrid, symbol, first_axis=1))


def _field_torus(u: SpaceTimeField):
    """Time torus of a field: (signal, values with shape (N, *xshape))."""
    flat = SampledFunction(u.tgrid, u.values.reshape(u.tgrid.n, -1))
    signal = spectral.periodize(flat)
    return signal, signal.values.reshape((signal.n,) + u.xgrid.shape)


def _sum_symbol(signal, xgrid: SpatialGrid, spec: SumOperatorSpec) -> np.ndarray:
    xi_t = signal.frequencies().reshape((-1,) + (1,) * xgrid.ndim)
    return spec.symbol(xi_t, spectral.xi_squared(xgrid)[None, ...])


def _apply_space_time_symbol(u: SpaceTimeField, spec: SumOperatorSpec, invert: bool) -> SpaceTimeField:
    require(not u.xgrid.half, "L acts on a full spatial torus", "sum_operator")
    signal, values = _field_torus(u)
    symbol = _sum_symbol(signal, u.xgrid, spec)
    if invert:
        if np.any(symbol == 0.0):
            raise BranchCutError("L has a zero mode and cannot be inverted", operation="sum_operator_inverse_apply")
        symbol = 1.0 / symbol
    out = np.fft.ifftn(np.fft.fftn(values) * symbol).real
    flat = spectral.unperiodize(signal, out.reshape(signal.n, -1))
    return u.with_values(flat.reshape(u.values.shape))


def sum_operator_apply(u: SpaceTimeField, spec: SumOperatorSpec) -> SpaceTimeField:
    """L u for L = (shift' - d/dt)^alpha + (shift - Laplacian)^order."""
    return _apply_space_time_symbol(u, spec, invert=False)


def sum_operator_inverse_apply(u: SpaceTimeField, spec: SumOperatorSpec) -> SpaceTimeField:
    """L^{-1} u, mode-wise division by the symbol of L."""
    return _apply_space_time_symbol(u, spec, invert=True)


def dore_venni_ratio(kt, kx, spec: SumOperatorSpec, sigma: float) -> np.ndarray:
    """|a|^sigma |b|^{1-sigma} / |a + b| per mode, a and b the symbols of the two parts of L."""
    require(0.0 <= sigma <= 1.0, "sigma must lie in [0, 1]", "dore_venni_ratio")
    kt = np.asarray(kt, dtype=float)
    kx = np.asarray(kx, dtype=float)
    a = spec.time.symbol(kt)
    b = spec.space.symbol(kx * kx)
    return np.abs(a) ** sigma * np.abs(b) ** (1.0 - sigma) / np.abs(a + b)


# ============================================================================
# Temporal trace
# ============================================================================


def _linear_moments(x0, x1, a):
    """int_{x0}^{x1} tau^a dtau and int_{x0}^{x1} tau^{a+1} dtau."""
    m0 = (x1 ** (a + 1.0) - x0 ** (a + 1.0)) / (a + 1.0)
    m1 = (x1 ** (a + 2.0) - x0 ** (a + 2.0)) / (a + 2.0)
    return m0, m1


@handle_numeric_errors("trace_t0")
def trace_t0(u: SampledFunction, wp: WeightParams, sigma: float = None) -> np.ndarray:
    """u(0) from the integral identity

        u(0) = (2-mu) (sigma^{-(2-mu)} F(sigma) - (2-mu) int_0^sigma t^{-(3-mu)} J(t) dt),
        F(t) = int_0^t tau^{1-mu} u dtau,  J(t) = u(t) t^{2-mu}/(2-mu) - F(t).

    u is interpolated piecewise linearly through [0, nodes < sigma, sigma]
    (u(0) linearly extrapolated, u(sigma) from a spline) and the moments of
    tau^{1-mu} are integrated exactly, so affine u is reproduced exactly.
    The outer integral uses the trapezoid rule.

    Raises:
        ValidationError: sigma outside (0, T] or fewer than two nodes below it
    """
    T = u.grid.T
    sigma = 0.5 * T if sigma is None else float(sigma)
    if not 0.0 < sigma <= T:
        raise ValidationError(f"sigma={sigma} exceeds the domain (0, {T}]", operation="trace_t0")
    below = u.nodes < sigma
    if np.count_nonzero(below) < 2:
        raise ValidationError("need at least two nodes below sigma", operation="trace_t0")

    a = 1.0 - wp.mu
    c = 2.0 - wp.mu
    inner = u.nodes[below]
    points = np.concatenate(([0.0], inner, [sigma]))
    at_zero = extrapolate_to_zero(u.nodes, u.values, order=1)
    at_sigma = resample(u, np.array([sigma]))[0] if sigma < T else extrapolate_to_end(u)
    values = np.vstack((at_zero, u.values[below], at_sigma))

    x0, x1 = points[:-1], points[1:]
    slopes = (values[1:] - values[:-1]) / (x1 - x0)[:, None]
    m0, m1 = _linear_moments(x0, x1, a)
    pieces = (values[:-1] - slopes * x0[:, None]) * m0[:, None] + slopes * m1[:, None]
    F = np.vstack((np.zeros((1, u.d)), np.cumsum(pieces, axis=0)))

    t = points[1:]
    J = values[1:] * (t ** c / c)[:, None] - F[1:]
    g_pos = J * (t ** (-(3.0 - wp.mu)))[:, None]
    g0 = extrapolate_to_zero(t, g_pos, order=1)
    g = np.vstack((g0, g_pos))
    outer = np.sum(0.5 * (g[1:] + g[:-1]) * np.diff(points)[:, None], axis=0)

    result = c * (F[-1] / sigma**c - c * outer)
    log_debug(f"trace_t0 sigma={sigma:.4g} -> {np.array2string(result, precision=6)}")
    return result


def extrapolate_to_end(u: SampledFunction) -> np.ndarray:
    """Cubic-spline value of u at t = T (extrapolated past the last node)."""
    spline = CubicSpline(u.nodes, u.values, axis=0, extrapolate=True)
    return spline(u.grid.T)


@dataclass
class TraceDiagnostic:
    quarter: np.ndarray
    half: np.ndarray

    @property
    def difference(self) -> float:
        return float(np.max(np.abs(self.quarter - self.half)))

    def to_dict(self):
        return {"sigma_T_over_4": self.quarter.tolist(), "sigma_T_over_2": self.half.tolist(), "difference": self.difference}


def trace_t0_diagnostic(u: SampledFunction, wp: WeightParams) -> TraceDiagnostic:
    """trace_t0 at sigma = T/4 and T/2."""
    T = u.grid.T
    return TraceDiagnostic(trace_t0(u, wp, 0.25 * T), trace_t0(u, wp, 0.5 * T))


@validate_inputs({"m": [IntegerRule(min_val=1)]})
def trace_rightinverse_S(u0: SpatialSample, m: int, tgrid: Grid1D) -> SpaceTimeField:
    """S u0 (t) = exp(-t (1 - Laplacian)^m) u0, mode-wise."""
    require(not u0.grid.half, "initial data must live on a full torus", "trace_rightinverse_S")
    lam = spectral.laplacian_symbol(spectral.xi_squared(u0.grid), m, 1.0).real
    coefficients = np.fft.fftn(u0.values)
    t = tgrid.nodes.reshape((-1,) + (1,) * u0.grid.ndim)
    axes = tuple(range(1, 1 + u0.grid.ndim))
    values = np.fft.ifftn(coefficients[None, ...] * np.exp(-t * lam[None, ...]), axes=axes).real
    return SpaceTimeField(tgrid, u0.grid, values)


# ============================================================================
# Spatial trace
# ============================================================================


def trace_y0(u: SpaceTimeField) -> Union[SampledFunction, SpaceTimeField]:
    """Quadratic extrapolation of the first three y layers to y = 0.

    One spatial dimension gives a SampledFunction in t; two give a field on
    the boundary grid x'.

    Raises:
        GridResolutionError: fewer than three y layers
    """
    xgrid = u.xgrid
    require(xgrid.half, "trace_y0 needs a half-space grid", "trace_y0")
    if xgrid.shape[-1] < MIN_TRACE_LAYERS:
        raise GridResolutionError(f"need at least {MIN_TRACE_LAYERS} y layers", operation="trace_y0")
    y = xgrid.axis_nodes(xgrid.ndim - 1)
    trace = extrapolate_to_zero(y, np.moveaxis(u.values, -1, 0), order=2)
    if xgrid.ndim == 1:
        return SampledFunction(u.tgrid, trace)
    return SpaceTimeField(u.tgrid, xgrid.boundary(), trace)


def trace_y0_rightinverse(
    g: Union[SampledFunction, SpaceTimeField],
    spec: SumOperatorSpec,
    m: int,
    n_y: int = 8,
    y_spacing: float = RIGHT_INVERSE_Y_SPACING,
) -> SpaceTimeField:
    """exp(-y L^{1/2m}) g on n_y cell-centred layers y = (j + 1/2) y_spacing.

    L has symbol (shift' - i xi_t) + (shift + |xi_x'|^2)^m; the root is the
    principal one. Time data is periodized unless the time domain is periodic.

    Raises:
        ValidationError: time order other than 1 or space order other than m
        BranchCutError: a symbol on the negative real axis
    """
    require(isinstance(m, int) and m >= 1, "m must be a positive integer", "trace_y0_rightinverse")
    require(spec.time.order == 1.0, "the time part of L must have order 1", "trace_y0_rightinverse")
    require(spec.space.order == m, "the space part of L must have order m", "trace_y0_rightinverse")

    if isinstance(g, SpaceTimeField):
        boundary = g.xgrid
        require(boundary.ndim == 1 and not boundary.half, "boundary data must live on a 1-D torus", "trace_y0_rightinverse")
        tgrid = g.tgrid
        flat = g.values.reshape(tgrid.n, -1)
        xi_squared = spectral.xi_squared(boundary)
    else:
        boundary = None
        tgrid = g.grid
        flat = g.values
        xi_squared = np.zeros(1)

    require(y_spacing > 0.0, "y_spacing must be positive", "trace_y0_rightinverse")
    y_extent = y_spacing * n_y
    if boundary is None:
        half = SpatialGrid((n_y,), 1.0, half=True, y_extent=y_extent)
    else:
        half = SpatialGrid(boundary.shape + (n_y,), boundary.length_scale, half=True, y_extent=y_extent)
    y = half.axis_nodes(half.ndim - 1)

    signal = spectral.periodize(SampledFunction(tgrid, flat))
    torus = signal.values.reshape((signal.n,) + xi_squared.shape)
    lam = spec.symbol(signal.frequencies()[:, None], xi_squared.reshape(1, -1))
    if np.any((lam.real < 0.0) & (lam.imag == 0.0)):
        raise BranchCutError("symbol on the negative real axis", operation="trace_y0_rightinverse")
    root = spectral.principal_power(lam, 1.0 / (2 * m))

    coefficients = np.fft.fft(torus, axis=0)
    if boundary is not None:
        coefficients = np.fft.fft(coefficients, axis=1)
    layers = []
    for yj in y:
        layer = coefficients * np.exp(-yj * root)
        if boundary is not None:
            layer = np.fft.ifft(layer, axis=1)
        layer = np.fft.ifft(layer, axis=0).real
        layers.append(spectral.unperiodize(signal, layer.reshape(signal.n, -1)))
    values = np.stack(layers, axis=-1)
    if boundary is not None:
        values = values.reshape((tgrid.n,) + boundary.shape + (n_y,))
    else:
        values = values.reshape(tgrid.n, n_y)
    return SpaceTimeField(tgrid, half, values)
