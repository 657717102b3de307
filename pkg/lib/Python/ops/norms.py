"""
aniso Norms - weighted Lebesgue, Sobolev, Slobodetskii, Bessel-potential,
anisotropic and semigroup Besov norms of sampled data.

Every result carries an error estimate from a two-grid comparison: the same
norm is recomputed on the grid obtained by merging neighbouring cells.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Union

import numpy as np
from scipy import integrate

from ops import spectral
from ops.grids import (
    COMPOSITE,
    Grading,
    Grid1D,
    SampledFunction,
    SpaceTimeField,
    SpatialSample,
    TimeDomain,
    WeightParams,
    extrapolate_to_zero,
    resample,
)
from utils.error_handling import (
    GridResolutionError,
    IntegerRule,
    LimitExponentError,
    MembershipError,
    NumericRangeRule,
    ProcessingError,
    ValidationError,
    require,
    validate_inputs,
)
from utils.general import format_decimal, log_debug

L = "L"
W = "W"
H = "H"
W0 = "W0"
H0 = "H0"
B = "B"
FAMILIES = (L, W, H, W0, H0, B)
ZERO_FAMILIES = (W0, H0)

MAX_SOBOLEV_ORDER = 4
# Nodes per derivative order required by finite differences
NODES_PER_ORDER = 8
MEMBERSHIP_TOL = 1e-6
SIGMA_POINTS = 200
SIGMA_MIN = 1e-6
SIGMA_MAX = 1e3


# ============================================================================
# Types
# ============================================================================


@dataclass(frozen=True)
class FractionalOrder:
    """s = [s] + s_*; both parts are derived on access."""

    s: float

    def __post_init__(self):
        require(
            isinstance(self.s, (int, float)) and math.isfinite(self.s) and self.s >= 0.0,
            f"order must be finite and >= 0, got {self.s}",
            "FractionalOrder",
        )
        object.__setattr__(self, "s", float(self.s))

    @classmethod
    def from_value(cls, s: Union[float, "FractionalOrder"]) -> "FractionalOrder":
        return s if isinstance(s, FractionalOrder) else cls(float(s))

    @property
    def integer_part(self) -> int:
        return int(math.floor(self.s))

    @property
    def fractional_part(self) -> float:
        return self.s - self.integer_part

    @property
    def is_integer(self) -> bool:
        return self.fractional_part == 0.0


@dataclass(frozen=True)
class SpaceSpec:
    """A function space request: family, order, weight and (optionally) domain."""

    family: str
    order: FractionalOrder
    wp: WeightParams
    domain: Optional[TimeDomain] = None

    def __post_init__(self):
        require(self.family in FAMILIES, f"unknown family '{self.family}', expected one of {FAMILIES}", "SpaceSpec")
        object.__setattr__(self, "order", FractionalOrder.from_value(self.order))
        s = self.order.s
        if self.family == L:
            require(s == 0.0, "family L has order 0", "SpaceSpec")
        if self.family == B:
            require(not self.order.is_integer, "family B requires a noninteger order (B^s_pp = W^s_p)", "SpaceSpec")
        if self.family in ZERO_FAMILIES:
            k = self.wp.limit_order(s)
            if k is not None:
                raise LimitExponentError(
                    f"limit exponent s = {k} + 1 - mu + 1/p is excluded",
                    operation="SpaceSpec",
                    details={"s": s, "k": k, "trace_limit": self.wp.trace_limit},
                )

    @property
    def s(self) -> float:
        return self.order.s

    def describe(self) -> Dict[str, object]:
        info = {"family": self.family, "s": self.s, "p": self.wp.p, "mu": self.wp.mu}
        if self.domain is not None:
            info["domain"] = self.domain.describe()
        return info


@dataclass
class NormResult:
    value: float
    resolution: int
    est_error: float = 0.0
    components: Dict[str, float] = field(default_factory=dict)
    truncation: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        self.value = float(self.value)
        self.est_error = float(self.est_error)
        if not (math.isfinite(self.value) and self.value >= 0.0):
            raise ProcessingError(f"norm value must be finite and >= 0, got {self.value}", operation="NormResult")
        if not (math.isfinite(self.est_error) and self.est_error >= 0.0):
            raise ProcessingError(f"est_error must be finite and >= 0, got {self.est_error}", operation="NormResult")

    def to_dict(self) -> Dict[str, object]:
        return {
            "value": format_decimal(self.value),
            "resolution": self.resolution,
            "est_error": format_decimal(self.est_error),
            "components": {name: format_decimal(v) for name, v in sorted(self.components.items())},
            "truncation": {name: format_decimal(v) for name, v in sorted(self.truncation.items())},
        }


@dataclass(frozen=True)
class Fiber:
    """Pointwise norm of the R^d values: (sum |v_i|^p * measure)^(1/p)."""

    p: float = 2.0
    measure: float = 1.0

    @classmethod
    def euclidean(cls) -> "Fiber":
        return cls()

    @classmethod
    def lp(cls, p: float, measure: float) -> "Fiber":
        return cls(p, measure)

    def norm(self, values: np.ndarray) -> np.ndarray:
        values = np.abs(values)
        if self.p == 2.0 and self.measure == 1.0:
            return np.sqrt(np.sum(values * values, axis=-1))
        return (np.sum(values**self.p, axis=-1) * self.measure) ** (1.0 / self.p)


EUCLIDEAN = Fiber.euclidean()


# ============================================================================
# Helpers
# ============================================================================


def coarsen(u: SampledFunction) -> SampledFunction:
    """Merge neighbouring cells pairwise and resample u at the new midpoints."""
    edges = u.grid.edges
    coarse_edges = edges[::2] if edges.size % 2 == 1 else np.append(edges[::2], edges[-1])
    grading = u.grid.grading if u.grid.grading.kind == "uniform" and edges.size % 2 == 1 else Grading(COMPOSITE)
    grid = Grid1D(u.grid.domain, coarse_edges, grading)
    return SampledFunction(grid, resample(u, grid.nodes))


def _two_grid_error(norm_fn: Callable[[SampledFunction], float], u: SampledFunction, value: float) -> float:
    try:
        coarse = norm_fn(coarsen(u))
    except GridResolutionError:
        log_debug("coarse grid too small for two-grid estimate; reporting the value itself")
        return abs(value)
    return abs(value - coarse)


def finite_difference(u: SampledFunction, order: int = 1) -> SampledFunction:
    """order-th derivative by repeated second-order differences on the node grid."""
    require(0 <= order <= MAX_SOBOLEV_ORDER, f"derivative order must be in [0, {MAX_SOBOLEV_ORDER}]", "finite_difference")
    minimum = NODES_PER_ORDER * 2**order
    if order > 0 and u.grid.n < minimum:
        raise GridResolutionError(
            f"grid too coarse for order-{order} derivatives: n={u.grid.n} < {minimum}",
            operation="finite_difference",
            details={"n": u.grid.n, "order": order},
        )
    values = np.array(u.values)
    for _ in range(order):
        values = np.gradient(values, u.grid.nodes, axis=0, edge_order=2)
    return u.with_values(values)


def _truncation_info(u: SampledFunction, wp: WeightParams, fiber: Fiber) -> Dict[str, float]:
    """T_trunc and an exponential-tail estimate beyond it for half-line data."""
    domain = u.grid.domain
    if not domain.is_truncated:
        return {}
    T = domain.T
    pointwise = fiber.norm(u.values)
    last, before = float(pointwise[-1]), float(pointwise[-2])
    tail = 0.0
    if last > 0.0 and before > last:
        rate = math.log(before / last) / (u.nodes[-1] - u.nodes[-2])
        tail = T**wp.weight_exponent * last**wp.p / (wp.p * rate)
    elif last > 0.0:
        tail = math.inf
    return {"T_trunc": T, "tail_bound": tail if math.isfinite(tail) else float(np.finfo(float).max)}


# ============================================================================
# Lebesgue and integer Sobolev norms
# ============================================================================


def _weighted_lp_value(u: SampledFunction, wp: WeightParams, fiber: Fiber = EUCLIDEAN) -> float:
    pointwise = fiber.norm(u.values)
    total = np.sum(u.grid.quad_weights * wp.weight(u.nodes) * pointwise**wp.p)
    return float(total ** (1.0 / wp.p))


def weighted_lp_norm(u: SampledFunction, wp: WeightParams, *, fiber: Fiber = EUCLIDEAN, estimate: bool = True):
    """|t^{1-mu} u|_{L_p}: (sum_i w_i t_i^{p(1-mu)} |u_i|^p)^(1/p).

    Args:
        u: Sampled function
        wp: Weight parameters
        fiber: Pointwise norm of the R^d values (Euclidean by default)
        estimate: Compute est_error by a two-grid comparison

    Returns:
        NormResult
    """
    value = _weighted_lp_value(u, wp, fiber)
    error = _two_grid_error(lambda c: _weighted_lp_value(c, wp, fiber), u, value) if estimate else 0.0
    return NormResult(value, u.grid.n, error, {"L": value}, _truncation_info(u, wp, fiber))


def unweighted_lp_norm(u: SampledFunction, p: float) -> NormResult:
    """Plain L_p norm along an independent code path (scaled by the sup to avoid overflow)."""
    require(1.0 < p < math.inf, f"p must satisfy 1 < p < inf, got {p}", "unweighted_lp_norm")
    magnitudes = np.linalg.norm(u.values, axis=1)
    peak = float(np.max(magnitudes)) if magnitudes.size else 0.0
    if peak == 0.0:
        return NormResult(0.0, u.grid.n)
    integral = np.dot(u.grid.quad_weights, (magnitudes / peak) ** p)
    return NormResult(peak * float(integral) ** (1.0 / p), u.grid.n)


def _sobolev_parts(u: SampledFunction, k: int, wp: WeightParams, fiber: Fiber) -> Dict[str, float]:
    parts = {"L": _weighted_lp_value(u, wp, fiber)}
    values = np.array(u.values)
    for j in range(1, k + 1):
        values = np.gradient(values, u.grid.nodes, axis=0, edge_order=2)
        parts[f"d{j}"] = _weighted_lp_value(u.with_values(values), wp, fiber)
    return parts


def _combine(parts: Dict[str, float], p: float) -> float:
    return float(sum(v**p for v in parts.values()) ** (1.0 / p))


@validate_inputs({"k": [IntegerRule(min_val=0, max_val=MAX_SOBOLEV_ORDER)]})
def sobolev_k_norm(u: SampledFunction, k: int, wp: WeightParams, *, fiber: Fiber = EUCLIDEAN, estimate: bool = True):
    """W^k_{p,mu} norm (sum_j |u^(j)|^p_{L_{p,mu}})^(1/p) with finite-difference derivatives.

    Raises:
        GridResolutionError: n < 8 * 2^k
    """
    minimum = NODES_PER_ORDER * 2**k
    if k > 0 and u.grid.n < minimum:
        raise GridResolutionError(
            f"grid too coarse for k={k}: n={u.grid.n} < {minimum}",
            operation="sobolev_k_norm",
            details={"n": u.grid.n, "k": k},
        )
    parts = _sobolev_parts(u, k, wp, fiber)
    value = _combine(parts, wp.p)
    error = _two_grid_error(lambda c: _combine(_sobolev_parts(c, k, wp, fiber), wp.p), u, value) if estimate else 0.0
    return NormResult(value, u.grid.n, error, parts, _truncation_info(u, wp, fiber))


# ============================================================================
# Slobodetskii seminorm
# ============================================================================


def _slobodetskii_value(u: SampledFunction, s: float, wp: WeightParams, fiber: Fiber) -> float:
    nodes = u.nodes
    weights = u.grid.quad_weights
    # rows i (t), columns j (tau), strict lower triangle j < i
    rows, cols = np.tril_indices(nodes.size, k=-1)
    diffs = fiber.norm(u.values[rows] - u.values[cols])
    gaps = nodes[rows] - nodes[cols]
    integrand = wp.weight(nodes[cols]) * diffs**wp.p * gaps ** (-1.0 - s * wp.p)
    total = np.sum(weights[rows] * weights[cols] * integrand)
    return float(total ** (1.0 / wp.p))


@validate_inputs({"s": [NumericRangeRule(0.0, 1.0, exclusive=True)]})
def slobodetskii_seminorm(u: SampledFunction, s: float, wp: WeightParams, *, fiber: Fiber = EUCLIDEAN, estimate=True):
    """[u]_{s} from int_0^T int_0^t tau^{p(1-mu)} |u(t)-u(tau)|^p (t-tau)^{-1-sp} dtau dt.

    Product midpoint rule over the strict lower triangle of cell pairs; the
    diagonal cells are left out, which underestimates smooth data slightly.
    """
    value = _slobodetskii_value(u, s, wp, fiber)
    error = _two_grid_error(lambda c: _slobodetskii_value(c, s, wp, fiber), u, value) if estimate else 0.0
    return NormResult(value, u.grid.n, error, {"seminorm": value})


# ============================================================================
# Fractional norms
# ============================================================================


def check_zero_membership(u: SampledFunction, spec: SpaceSpec, tol: float = MEMBERSHIP_TOL) -> None:
    """Verify u^(j)(0) = 0 (extrapolated) for every j < s - (1 - mu + 1/p).

    Raises:
        MembershipError: an extrapolated trace exceeds tol * sup|u|
    """
    count = spec.wp.trace_count(spec.s)
    if count == 0:
        return
    scale = float(np.max(np.abs(u.values))) if u.values.size else 0.0
    if scale == 0.0:
        return
    for j in range(count):
        derivative = finite_difference(u, j)
        trace = np.linalg.norm(extrapolate_to_zero(derivative.nodes, derivative.values, order=2))
        if trace > tol * scale:
            raise MembershipError(
                f"u^({j})(0) = {trace:.3e} does not vanish: u is outside {spec.family}^{spec.s}",
                operation="check_zero_membership",
                details={"j": j, "trace": float(trace), "tolerance": tol * scale},
            )


def bessel_time_values(u: SampledFunction, s: float) -> np.ndarray:
    """Values of (1 - d/dt)^s u at u's nodes."""
    if s == 0.0:
        return np.array(u.values)
    return spectral.apply_time_multiplier(u, lambda xi: spectral.time_deriv_minus_symbol(xi, s, 1.0))


def _fractional_parts(u: SampledFunction, spec: SpaceSpec, fiber: Fiber) -> Dict[str, float]:
    wp = spec.wp
    s = spec.order
    if spec.family == L:
        return {"L": _weighted_lp_value(u, wp, fiber)}
    if spec.family in (H, H0):
        values = bessel_time_values(u, s.s)
        return {"H": _weighted_lp_value(u.with_values(values), wp, fiber)}

    k = s.integer_part
    require(k <= MAX_SOBOLEV_ORDER, f"integer part of s must be <= {MAX_SOBOLEV_ORDER}", "fractional_norm")
    minimum = NODES_PER_ORDER * 2**k
    if k > 0 and u.grid.n < minimum:
        raise GridResolutionError(f"grid too coarse for s={s.s}: n={u.grid.n} < {minimum}", operation="fractional_norm")
    parts = _sobolev_parts(u, k, wp, fiber)
    if not s.is_integer:
        parts["seminorm"] = _slobodetskii_value(finite_difference(u, k), s.fractional_part, wp, fiber)
    return parts


def fractional_norm(u: SampledFunction, spec: SpaceSpec, *, fiber: Fiber = EUCLIDEAN, check_membership=True, estimate=True):
    """Norm of u in the space described by spec.

    W/B: W^{[s]} norm combined with the seminorm of the [s]-th derivative.
    H and H0: |(1 - d/dt)^s u|_{L_{p,mu}} on the periodized data. W0/H0 first
    check that the traces vanish.

    Raises:
        MembershipError: W0/H0 requested for data with a nonzero trace
    """
    if spec.family in ZERO_FAMILIES and check_membership:
        check_zero_membership(u, spec)
    parts = _fractional_parts(u, spec, fiber)
    value = _combine(parts, spec.wp.p)
    error = 0.0
    if estimate:
        error = _two_grid_error(lambda c: _combine(_fractional_parts(c, spec, fiber), spec.wp.p), u, value)
    return NormResult(value, u.grid.n, error, parts, _truncation_info(u, spec.wp, fiber))


# ============================================================================
# Space-time norms
# ============================================================================


def field_as_function(u: SpaceTimeField) -> SampledFunction:
    """View a field as a function of t with values in R^{number of spatial points}."""
    return SampledFunction(u.tgrid, u.values.reshape(u.tgrid.n, -1))


def spatial_fiber(u: SpaceTimeField, p: float) -> Fiber:
    return Fiber.lp(p, u.xgrid.cell_volume)


def _spatial_bessel(u: SpaceTimeField, order: float) -> np.ndarray:
    if order == 0.0:
        return np.array(u.values)
    require(not u.xgrid.half, "spatial multipliers need a full torus", "spatial norm")
    return spectral.apply_spatial_symbol(u.values, u.xgrid, spectral.bessel_symbol(u.xgrid, order), first_axis=1)


def anisotropic_norm(u: SpaceTimeField, time_spec: SpaceSpec, space_order: float, *, estimate: bool = True):
    """|u|_{time_spec(L_p)} + |u|_{L_{p,mu}(H^{space_order})}.

    Raises:
        ValidationError: inconsistent field shape or negative space_order
    """
    require(space_order >= 0.0, "space_order must be >= 0", "anisotropic_norm")
    expected = (u.tgrid.n,) + u.xgrid.shape
    if u.values.shape != expected:
        raise ValidationError(f"field shape {u.values.shape} != {expected}", operation="anisotropic_norm")
    fiber = spatial_fiber(u, time_spec.wp.p)
    time_part = fractional_norm(field_as_function(u), time_spec, fiber=fiber, estimate=estimate)
    spatial_values = _spatial_bessel(u, space_order).reshape(u.tgrid.n, -1)
    space_part = weighted_lp_norm(SampledFunction(u.tgrid, spatial_values), time_spec.wp, fiber=fiber, estimate=estimate)
    value = time_part.value + space_part.value
    return NormResult(
        value,
        u.tgrid.n * int(np.prod(u.xgrid.shape)),
        time_part.est_error + space_part.est_error,
        {"time": time_part.value, "space": space_part.value},
    )


def mixed_norm(u: SpaceTimeField, time_order: float, space_order: float, wp: WeightParams) -> NormResult:
    """|(1 - d/dt)^a (1 - Laplacian)^{b/2} u|_{L_{p,mu}(L_p)}, the H^a(H^b) norm."""
    require(time_order >= 0.0 and space_order >= 0.0, "orders must be >= 0", "mixed_norm")
    spatial_values = _spatial_bessel(u, space_order).reshape(u.tgrid.n, -1)
    as_function = SampledFunction(u.tgrid, spatial_values)
    values = bessel_time_values(as_function, time_order)
    fiber = spatial_fiber(u, wp.p)
    value = _weighted_lp_value(as_function.with_values(values), wp, fiber)
    return NormResult(value, u.tgrid.n * int(np.prod(u.xgrid.shape)), 0.0, {"a": time_order, "b": space_order})


@validate_inputs({"theta": [NumericRangeRule(0.0, 1.0, exclusive=True)], "m": [IntegerRule(min_val=1)]})
def semigroup_besov_norm(x: SpatialSample, theta: float, wp: WeightParams, m: int = 1, points: int = SIGMA_POINTS):
    """(int_0^inf sigma^{p(1-theta)} |A e^{-sigma A} x|_{L_p}^p dsigma/sigma)^(1/p), A = (1 - Laplacian)^m.

    Trapezoid rule in log(sigma) over [SIGMA_MIN, SIGMA_MAX]; the part below
    SIGMA_MIN is added analytically with e^{-sigma A} ~ 1 and the part above
    SIGMA_MAX is negligible since A >= 1.
    """
    require(not x.grid.half, "semigroup norms need a full torus", "semigroup_besov_norm")
    p = wp.p
    lam = spectral.laplacian_symbol(spectral.xi_squared(x.grid), m, 1.0).real
    coefficients = np.fft.fftn(x.values)
    cell = x.grid.cell_volume

    def lp_of(symbol):
        values = np.fft.ifftn(coefficients * symbol).real
        return float(np.sum(np.abs(values) ** p) * cell)

    exponent = p * (1.0 - theta)

    def integral(sigmas):
        logs = np.log(sigmas)
        integrand = np.array([sigma**exponent * lp_of(lam * np.exp(-sigma * lam)) for sigma in sigmas])
        return float(integrate.trapezoid(integrand, logs))

    sigmas = np.geomspace(SIGMA_MIN, SIGMA_MAX, points)
    body = integral(sigmas)
    lower_tail = SIGMA_MIN**exponent / exponent * lp_of(lam)
    value = (body + lower_tail) ** (1.0 / p)
    coarse = (integral(sigmas[::2]) + lower_tail) ** (1.0 / p)
    return NormResult(
        value,
        int(np.prod(x.grid.shape)),
        abs(value - coarse),
        {"quadrature": body, "lower_tail": lower_tail},
        {"sigma_min": SIGMA_MIN, "sigma_max": SIGMA_MAX},
    )


# ============================================================================
# Embedding measurements
# ============================================================================


@validate_inputs({"k": [IntegerRule(min_val=0, max_val=MAX_SOBOLEV_ORDER)]})
def sup_norm_derivatives(u: SampledFunction, k: int) -> NormResult:
    """max_{j <= k} sup |u^(j)|, including the value at 0 obtained by extrapolation."""
    parts = {}
    for j in range(k + 1):
        derivative = finite_difference(u, j)
        at_zero = float(np.linalg.norm(extrapolate_to_zero(derivative.nodes, derivative.values, order=2)))
        parts[f"sup_d{j}"] = max(float(np.max(np.linalg.norm(derivative.values, axis=1))), at_zero)
    return NormResult(max(parts.values()), u.grid.n, 0.0, parts)


def local_embedding_ratio(u: SampledFunction, wp: WeightParams, s: float, t0: float) -> NormResult:
    """|u|_{W^s_p(t0,T)} / |u|_{W^s_{p,mu}(0,T)} for 0 < t0 < T.

    t0 is moved to the nearest cell edge at or above it; the local norm is
    unweighted, so the sub-interval is shifted to start at 0.
    """
    edges = u.grid.edges
    require(0.0 < t0 < u.grid.T, "t0 must lie in (0, T)", "local_embedding_ratio")
    cut = int(np.searchsorted(edges, t0 - 1e-12 * u.grid.T))
    cut = min(cut, edges.size - 1 - NODES_PER_ORDER * 2 ** int(math.floor(s)))
    require(cut > 0, "t0 leaves too few cells", "local_embedding_ratio")
    local_grid = Grid1D(TimeDomain.finite(edges[-1] - edges[cut]), edges[cut:] - edges[cut], Grading(COMPOSITE))
    local = SampledFunction(local_grid, u.values[cut:])

    unweighted = wp.unweighted()
    local_norm = fractional_norm(local, SpaceSpec(W, s, unweighted), estimate=False).value
    global_norm = fractional_norm(u, SpaceSpec(W, s, wp), estimate=False).value
    require(global_norm > 0.0, "u must be nonzero", "local_embedding_ratio")
    return NormResult(
        local_norm / global_norm,
        u.grid.n,
        0.0,
        {"local": local_norm, "weighted": global_norm, "t0": float(edges[cut])},
    )
