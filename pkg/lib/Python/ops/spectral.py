"""
aniso Spectral Plumbing - periodization and Fourier multipliers.

Time data on (0, T) is moved to a torus of period PADDING_FACTOR * T: the
samples are put on a uniform lattice, continued past T by an order-k
reflection times a C-infinity cutoff, and zero-padded. Periodic domains skip
the protocol and use their own period. All fractional powers use the
principal branch with arguments in (-pi, pi].
"""

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from ops.grids import Grid1D, SampledFunction, SpatialGrid, resample
from utils.error_handling import GridResolutionError, require

PADDING_FACTOR = 4
PERIODIZATION_ORDER = 3
MIN_LATTICE_POINTS = 64
MAX_REFLECTION_ORDER = 4


# ============================================================================
# Reflection extension building blocks
# ============================================================================


def reflection_coefficients(k: int) -> np.ndarray:
    """Coefficients lambda_j, j = 1..k+1, of the order-k reflection.

    E u(T + h) = sum_j lambda_j u(T - j h) matches u and its first k
    derivatives at T, i.e. sum_j lambda_j (-j)^i = 1 for i = 0..k.
    """
    require(0 <= k <= MAX_REFLECTION_ORDER, f"reflection order must be in [0, {MAX_REFLECTION_ORDER}]", "reflection")
    j = np.arange(1, k + 2, dtype=float)
    vandermonde = np.vander(-j, k + 1, increasing=True).T
    return np.linalg.solve(vandermonde, np.ones(k + 1))


def support_end(T: float, k: int) -> float:
    """T_k = T + T / (2k + 2): the extension vanishes beyond this point."""
    return T + T / (2.0 * k + 2.0)


def _smooth_step(x: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for x <= 0, 1 for x >= 1."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    out = np.zeros_like(x)
    inner = (x > 0.0) & (x < 1.0)
    a = np.exp(-1.0 / x[inner])
    b = np.exp(-1.0 / (1.0 - x[inner]))
    out[inner] = a / (a + b)
    out[x >= 1.0] = 1.0
    return out


def smooth_cutoff(t, start: float, end: float) -> np.ndarray:
    """Equal to 1 for t <= start, 0 for t >= end, C-infinity in between."""
    return _smooth_step((end - np.asarray(t, dtype=float)) / (end - start))


def reflect_beyond(u: SampledFunction, points: np.ndarray, k: int) -> np.ndarray:
    """Order-k reflection of u at the points t > T, multiplied by the cutoff.

    Only values of u on (T/2, T) are used.
    """
    T = u.grid.T
    T_k = support_end(T, k)
    nodes = u.grid.nodes
    inside = nodes > 0.5 * T
    if np.count_nonzero(inside) < 2 * (k + 1):
        raise GridResolutionError(
            f"grid too coarse for order-{k} reflection: {np.count_nonzero(inside)} nodes in (T/2, T)",
            operation="reflect_beyond",
            details={"k": k},
        )
    # Spline through (T/2, T) only; the reflection never looks further back
    spline = CubicSpline(nodes[inside], u.values[inside], axis=0, extrapolate=True)
    coefficients = reflection_coefficients(k)
    points = np.asarray(points, dtype=float)
    h = np.clip(points - T, 0.0, T_k - T)
    out = np.zeros((points.size, u.d))
    for j, lam in enumerate(coefficients, start=1):
        out += lam * spline(T - j * h)
    out *= smooth_cutoff(points, T, T_k)[:, None]
    out[points >= T_k] = 0.0
    return out


# ============================================================================
# Time torus
# ============================================================================


@dataclass(frozen=True, eq=False)
class TorusSignal:
    """Uniform samples on a time torus; the first n_inner samples cover (0, T)."""

    values: np.ndarray
    period: float
    n_inner: int
    source_grid: Grid1D

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    @property
    def spacing(self) -> float:
        return self.period / self.n

    def frequencies(self) -> np.ndarray:
        return 2.0 * math.pi * np.fft.fftfreq(self.n, d=self.spacing)


def _lattice_size(n: int) -> int:
    return max(MIN_LATTICE_POINTS, 1 << int(math.ceil(math.log2(n))))


def periodize(u: SampledFunction, k: int = PERIODIZATION_ORDER, padding: int = PADDING_FACTOR) -> TorusSignal:
    """Place u on a torus ready for Fourier multipliers.

    Args:
        u: Sampled function
        k: Reflection order of the continuation past T
        padding: Torus period in units of T

    Returns:
        TorusSignal
    """
    grid = u.grid
    if grid.domain.is_periodic:
        require(grid.is_uniform, "periodic data must live on a uniform grid", "periodize")
        return TorusSignal(np.array(u.values), grid.T, grid.n, grid)

    T = grid.T
    if grid.is_uniform:
        n_inner = grid.n
        inner = np.array(u.values)
    else:
        n_inner = _lattice_size(grid.n)
        inner = resample(u, (np.arange(n_inner) + 0.5) * (T / n_inner))

    h = T / n_inner
    n_total = padding * n_inner
    outer_points = (np.arange(n_inner, n_total) + 0.5) * h
    outer = reflect_beyond(u, outer_points, k)
    values = np.concatenate((inner, outer), axis=0)
    return TorusSignal(values, padding * T, n_inner, grid)


def unperiodize(signal: TorusSignal, values: np.ndarray) -> np.ndarray:
    """Bring torus values back to the nodes of the source grid."""
    grid = signal.source_grid
    inner = values[: signal.n_inner]
    if grid.domain.is_periodic or grid.is_uniform:
        return inner
    h = grid.T / signal.n_inner
    lattice = (np.arange(signal.n_inner) + 0.5) * h
    spline = CubicSpline(lattice, inner, axis=0, extrapolate=True)
    return spline(grid.nodes)


def principal_power(z, exponent: float) -> np.ndarray:
    """z**exponent on the principal branch; 0**exponent = 0 for exponent > 0."""
    z = np.asarray(z, dtype=complex)
    if exponent == 0:
        return np.ones_like(z)
    out = np.zeros_like(z)
    nonzero = z != 0
    out[nonzero] = np.exp(exponent * np.log(z[nonzero]))
    return out


def time_deriv_minus_symbol(xi, order: float, shift: float) -> np.ndarray:
    """Symbol of (shift - d/dt)^order."""
    return principal_power(shift - 1j * np.asarray(xi, dtype=float), order)


def time_deriv_plus_symbol(xi, order: float, shift: float) -> np.ndarray:
    """Symbol of (shift + d/dt)^order."""
    return principal_power(shift + 1j * np.asarray(xi, dtype=float), order)


def laplacian_symbol(xi_squared, order: float, shift: float) -> np.ndarray:
    """Symbol of (shift - Laplacian)^order."""
    return principal_power(shift + np.asarray(xi_squared, dtype=float), order)


def apply_time_symbol(values: np.ndarray, symbol: np.ndarray) -> np.ndarray:
    """Multiply the time Fourier coefficients (axis 0) by symbol."""
    coefficients = np.fft.fft(values, axis=0)
    shape = (-1,) + (1,) * (values.ndim - 1)
    return np.fft.ifft(coefficients * symbol.reshape(shape), axis=0).real


def apply_time_multiplier(u: SampledFunction, symbol_fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Periodize u, multiply by symbol_fn(xi) and return values at u's nodes."""
    signal = periodize(u)
    out = apply_time_symbol(signal.values, symbol_fn(signal.frequencies()))
    return unperiodize(signal, out)


# ============================================================================
# Spatial torus
# ============================================================================


def wavenumber_mesh(xgrid: SpatialGrid) -> Sequence[np.ndarray]:
    """Per-axis wavenumbers broadcast to the grid shape (ij indexing)."""
    return np.meshgrid(*[xgrid.wavenumbers(i) for i in range(xgrid.ndim)], indexing="ij")


def xi_squared(xgrid: SpatialGrid) -> np.ndarray:
    return sum(k**2 for k in wavenumber_mesh(xgrid))


def apply_spatial_symbol(values: np.ndarray, xgrid: SpatialGrid, symbol: np.ndarray, first_axis: int = 0):
    """Multiply the spatial Fourier coefficients by symbol (shape xgrid.shape)."""
    axes = tuple(range(first_axis, first_axis + xgrid.ndim))
    coefficients = np.fft.fftn(values, axes=axes)
    shape = (1,) * first_axis + symbol.shape
    return np.fft.ifftn(coefficients * symbol.reshape(shape), axes=axes).real


def bessel_symbol(xgrid: SpatialGrid, order: float) -> np.ndarray:
    """(1 + |xi|^2)^(order/2), the spatial H^order multiplier."""
    return np.power(1.0 + xi_squared(xgrid), 0.5 * order)
