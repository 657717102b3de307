"""
aniso Oracle - independent reference values.

Closed forms for monomials, exponentials, Fourier modes and Gaussians,
Richardson-extrapolated dense quadrature, and brute-force K-functional
minimization. Nothing here calls into norms, operators or spectral: the
reference path has its own quadrature and its own formulas.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List

import numpy as np
from scipy import integrate, optimize, special

from ops.grids import WeightParams
from utils.cache import cached
from utils.error_handling import (
    ConvergenceError,
    IntegerRule,
    NumericRangeRule,
    ProcessingError,
    ValidationError,
    handle_numeric_errors,
    require,
    safe_operation,
    validate_inputs,
)
from utils.general import log_debug
from utils.validation import validate_close

MONOMIAL = "monomial"
EXPONENTIAL = "exponential"
TRIG = "trig"
GAUSSIAN = "gaussian"
CLOSED_FORM_KINDS = (MONOMIAL, EXPONENTIAL, TRIG, GAUSSIAN)

DENSE_BASE_CELLS = 16
ROMBERG_RATE_WINDOW = 0.1
LOW_RATE = 1.5
GATE_RTOL = 1e-3
BRUTE_MAX_MODES = 16
BRUTE_GAP_TOL = 1e-6
QUAD_LIMIT = 1000


# ============================================================================
# Closed forms
# ============================================================================


@dataclass(frozen=True)
class ClosedForm:
    """c * t^g, c * exp(-l t), c * sin(k t + phase), or c * exp(-a (t - center)^2)."""

    kind: str
    param: float
    coefficient: float = 1.0
    phase: float = 0.0
    center: float = 0.0

    def __post_init__(self):
        require(self.kind in CLOSED_FORM_KINDS, f"unknown closed form '{self.kind}'", "ClosedForm")
        require(math.isfinite(self.param) and math.isfinite(self.coefficient), "parameters must be finite", "ClosedForm")
        if self.kind == GAUSSIAN:
            require(self.param > 0.0, "gaussian rate must be positive", "ClosedForm")

    @classmethod
    def monomial(cls, gamma: float, coefficient: float = 1.0) -> "ClosedForm":
        return cls(MONOMIAL, gamma, coefficient)

    @classmethod
    def exponential(cls, rate: float, coefficient: float = 1.0) -> "ClosedForm":
        return cls(EXPONENTIAL, rate, coefficient)

    @classmethod
    def trig(cls, k: float, coefficient: float = 1.0, phase: float = 0.0) -> "ClosedForm":
        return cls(TRIG, k, coefficient, phase=phase)

    @classmethod
    def gaussian(cls, a: float, coefficient: float = 1.0, center: float = 0.0) -> "ClosedForm":
        return cls(GAUSSIAN, a, coefficient, center=center)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        c = self.coefficient
        if self.kind == MONOMIAL:
            return c * np.power(t, self.param)
        if self.kind == EXPONENTIAL:
            return c * np.exp(-self.param * t)
        if self.kind == TRIG:
            return c * np.sin(self.param * t + self.phase)
        return c * np.exp(-self.param * (t - self.center) ** 2)

    def derivative(self, t, order: int = 1):
        """order-th derivative evaluated at t."""
        if order == 0:
            return self(t)
        t = np.asarray(t, dtype=float)
        if self.kind == GAUSSIAN:
            root = math.sqrt(self.param)
            x = t - self.center
            hermite = special.eval_hermite(order, root * x)
            return self.coefficient * (-root) ** order * hermite * np.exp(-self.param * x**2)
        return self.derivative_form(order)(t)

    def derivative_form(self, order: int) -> "ClosedForm":
        """The derivative as another ClosedForm (not available for gaussians)."""
        require(self.kind != GAUSSIAN, "gaussian derivatives are not closed forms of the same kind", "derivative_form")
        c = self.coefficient
        if self.kind == MONOMIAL:
            falling = special.poch(self.param - order + 1, order)
            return ClosedForm(MONOMIAL, self.param - order, c * falling)
        if self.kind == EXPONENTIAL:
            return ClosedForm(EXPONENTIAL, self.param, c * (-self.param) ** order)
        return ClosedForm(TRIG, self.param, c * self.param**order, phase=self.phase + order * math.pi / 2)

    def in_weighted_lp(self, wp: WeightParams) -> bool:
        """L_{p,mu}(0,T) membership (only monomials can fail)."""
        if self.kind == MONOMIAL and self.coefficient != 0.0:
            return self.param > -(1.0 - wp.mu) - 1.0 / wp.p
        return True

    def cache_key(self):
        return {"kind": self.kind, "param": self.param, "c": self.coefficient, "phase": self.phase, "x0": self.center}


def _quad(f: Callable, a: float, b: float, **kwargs) -> float:
    value, _ = integrate.quad(f, a, b, limit=QUAD_LIMIT, epsabs=0.0, epsrel=1e-13, **kwargs)
    return value


def _weighted_power_integral(cf: ClosedForm, wp: WeightParams, T: float) -> float:
    """int_0^T t^{p(1-mu)} |cf(t)|^p dt."""
    p = wp.p
    a = wp.weight_exponent
    c = abs(cf.coefficient) ** p
    if cf.coefficient == 0.0:
        return 0.0

    if cf.kind == MONOMIAL:
        exponent = cf.param * p + a + 1.0
        if exponent <= 0.0:
            raise ValidationError(
                f"t^{cf.param} is not in L_(p,mu) for p={p}, mu={wp.mu}",
                operation="exact_weighted_lp",
                details={"gamma": cf.param},
            )
        return c * T**exponent / exponent

    if cf.kind == EXPONENTIAL:
        rate = p * cf.param
        if rate > 0.0:
            return c * rate ** (-(a + 1.0)) * special.gamma(a + 1.0) * special.gammainc(a + 1.0, rate * T)
        if rate == 0.0:
            return c * T ** (a + 1.0) / (a + 1.0)
        if a == 0.0:
            return c * math.expm1(-rate * T) / (-rate)
        return c * _quad(lambda t: t**a * math.exp(-rate * t), 0.0, T)

    if cf.kind == TRIG:
        k = cf.param
        phi = cf.phase
        if k == 0.0:
            return c * abs(math.sin(phi)) ** p * T ** (a + 1.0) / (a + 1.0)
        if p == 2.0:
            # sin^2 = (1 - cos(2kt + 2phi)) / 2
            if a == 0.0:
                oscillating = (math.sin(2 * k * T + 2 * phi) - math.sin(2 * phi)) / (2 * k)
            else:
                cos_part = _quad(lambda t: t**a, 0.0, T, weight="cos", wvar=2 * k)
                sin_part = _quad(lambda t: t**a, 0.0, T, weight="sin", wvar=2 * k)
                oscillating = math.cos(2 * phi) * cos_part - math.sin(2 * phi) * sin_part
            return c * 0.5 * (T ** (a + 1.0) / (a + 1.0) - oscillating)
        zeros = [(j * math.pi - phi) / k for j in range(-2, int(abs(k) * T / math.pi) + 3)]
        points = sorted(z for z in zeros if 0.0 < z < T)
        return c * _quad(lambda t: t**a * abs(math.sin(k * t + phi)) ** p, 0.0, T, points=points or None)

    rate = p * cf.param
    if cf.center == 0.0:
        half = 0.5 * (a + 1.0)
        return c * 0.5 * rate ** (-half) * special.gamma(half) * special.gammainc(half, rate * T * T)
    if a == 0.0:
        root = math.sqrt(rate)
        return c * 0.5 * math.sqrt(math.pi / rate) * (special.erf(root * (T - cf.center)) + special.erf(root * cf.center))
    return c * _quad(lambda t: t**a * math.exp(-rate * (t - cf.center) ** 2), 0.0, T, points=[cf.center])


@cached("exact_weighted_lp")
def exact_weighted_lp(cf: ClosedForm, wp: WeightParams, T: float) -> float:
    """|cf|_{L_{p,mu}(0,T)} from antiderivatives of t^{p(1-mu)} |cf|^p.

    Raises:
        ValidationError: for non-integrable parameter combinations
    """
    require(T > 0.0, "T must be positive", "exact_weighted_lp")
    if not cf.in_weighted_lp(wp):
        raise ValidationError(
            f"{cf.kind}({cf.param}) is not integrable against t^{wp.weight_exponent}",
            operation="exact_weighted_lp",
        )
    return float(_weighted_power_integral(cf, wp, T) ** (1.0 / wp.p))


@cached("exact_derivative_lp")
def exact_derivative_lp(cf: ClosedForm, wp: WeightParams, T: float, order: int = 1) -> float:
    """|cf^{(order)}|_{L_{p,mu}(0,T)}."""
    if cf.kind == GAUSSIAN:
        a = wp.weight_exponent
        value = _quad(lambda t: t**a * abs(float(cf.derivative(t, order))) ** wp.p, 0.0, T)
        return float(value ** (1.0 / wp.p))
    derivative = cf.derivative_form(order)
    if derivative.coefficient == 0.0:
        return 0.0
    return exact_weighted_lp(derivative, wp, T)


@cached("exact_seminorm_monomial")
def exact_seminorm_monomial(gamma: float, wp: WeightParams, s: float, T: float) -> float:
    """Slobodetskii seminorm of t^gamma over the lower triangle tau < t < T.

    Substituting tau = t x gives T^e / e times a one-dimensional integral,
    which is a Beta function for gamma = 1.
    """
    require(0.0 < s < 1.0, "s must lie in (0, 1)", "exact_seminorm_monomial")
    p = wp.p
    a = wp.weight_exponent
    exponent = a + gamma * p - s * p + 1.0
    require(exponent > 0.0, "seminorm diverges at t = 0", "exact_seminorm_monomial")
    if gamma == 1.0:
        inner = special.beta(a + 1.0, p * (1.0 - s))
    elif gamma == 0.0:
        return 0.0
    else:
        inner = _quad(lambda x: x**a * abs(1.0 - x**gamma) ** p * (1.0 - x) ** (-1.0 - s * p), 0.0, 1.0)
    return float((inner * T**exponent / exponent) ** (1.0 / p))


def exact_seminorm_linear(wp: WeightParams, s: float, T: float) -> float:
    """[t]_{s}: (B(p(1-mu)+1, p(1-s)) T^e / e)^(1/p) with e = p(1-mu) + p(1-s) + 1."""
    return exact_seminorm_monomial(1.0, wp, s, T)


def exact_single_mode_besov(k: float, theta: float, m: int = 1, amplitude_l2: float = 1.0) -> float:
    """Semigroup Besov norm (p = 2) of a single Fourier mode with L_2 norm amplitude_l2."""
    lam = (1.0 + k * k) ** m
    e = 2.0 * (1.0 - theta)
    return float(amplitude_l2 * lam**theta * math.sqrt(special.gamma(e) / 2.0**e))


def exact_single_mode_interp(w: float, theta: float, p: float, amplitude: float = 1.0) -> float:
    """(int (t^-theta K2(t))^p dt/t)^(1/p) for one mode with couple weights (1, w)."""
    beta = special.beta(0.5 * p * (1.0 - theta), 0.5 * p * theta)
    return float(abs(amplitude) * w**theta * (0.5 * beta) ** (1.0 / p))


def single_mode_k(u_abs: float, w0: float, w1: float, t: float) -> float:
    """K(t) for one mode: the split cost is linear in the split fraction, so an endpoint wins."""
    return float(abs(u_abs) * min(w0, t * w1))


# ============================================================================
# Dense quadrature ladder
# ============================================================================


@dataclass
class DenseQuadratureResult:
    value: float
    extrapolated: float
    rate: float
    flagged: bool
    ladder: List[float] = field(default_factory=list)

    def to_dict(self) -> Dict[str, object]:
        return {
            "value": self.value,
            "extrapolated": self.extrapolated,
            "rate": self.rate,
            "flagged": self.flagged,
            "ladder": list(self.ladder),
        }


def _oracle_midpoint(integrand: Callable, T: float, n: int, grading: str) -> float:
    x = np.linspace(0.0, 1.0, n + 1)
    edges = T * (x * x if grading == "graded" else x)
    nodes = 0.5 * (edges[:-1] + edges[1:])
    with np.errstate(all="ignore"):
        values = np.asarray(integrand(nodes), dtype=float)
    if not np.all(np.isfinite(values)):
        raise ProcessingError("integrand is not finite at quadrature nodes", operation="dense_quadrature")
    return float(np.sum(values * np.diff(edges)))


@validate_inputs({"levels": [IntegerRule(min_val=3)], "T": [NumericRangeRule(0.0, None, exclusive=True)]})
def dense_quadrature(integrand: Callable, T: float, levels: int = 4, grading: str = "graded") -> DenseQuadratureResult:
    """Midpoint ladder on DENSE_BASE_CELLS * 2^l cells with Richardson extrapolation.

    Args:
        integrand: Vectorized integrand on (0, T)
        T: Interval length
        levels: Number of dyadic levels (>= 3)
        grading: "uniform" or "graded" (cells T (j/n)^2, for end-point singularities)

    Returns:
        DenseQuadratureResult with the observed rate; rates below 1.5 are flagged

    Raises:
        ConvergenceError: when successive differences grow (singularity too strong)
    """
    require(grading in ("uniform", "graded"), f"unknown grading '{grading}'", "dense_quadrature")
    ladder = [_oracle_midpoint(integrand, T, DENSE_BASE_CELLS * 2**level, grading) for level in range(levels)]
    diffs = np.diff(ladder)
    scale = max(abs(ladder[-1]), np.finfo(float).tiny)
    noise = 64.0 * np.finfo(float).eps * scale

    significant = np.abs(diffs) > noise
    for i in range(1, diffs.size):
        if significant[i] and abs(diffs[i]) > abs(diffs[i - 1]):
            raise ConvergenceError(
                "refinement sequence is not monotone: singularity stronger than the grading resolves",
                operation="dense_quadrature",
                details={"ladder": ladder},
            )

    if not significant[-1]:
        return DenseQuadratureResult(ladder[-1], ladder[-1], math.inf, False, ladder)

    rate = math.log2(abs(diffs[-2]) / abs(diffs[-1])) if significant[-2] else math.inf
    if grading == "uniform" and abs(rate - 2.0) < ROMBERG_RATE_WINDOW:
        # Midpoint errors expand in even powers of h
        table = list(ladder)
        for order in range(1, levels):
            factor = 4.0**order
            table = [(factor * table[i + 1] - table[i]) / (factor - 1.0) for i in range(len(table) - 1)]
        extrapolated = table[-1]
    elif math.isfinite(rate) and rate > 0.0:
        extrapolated = ladder[-1] + diffs[-1] / (2.0**rate - 1.0)
    else:
        extrapolated = ladder[-1]

    flagged = rate < LOW_RATE
    log_debug(f"dense_quadrature rate={rate:.3f} flagged={flagged}")
    return DenseQuadratureResult(ladder[-1], float(extrapolated), float(rate), bool(flagged), ladder)


def dense_weighted_lp(cf: ClosedForm, wp: WeightParams, T: float, levels: int = 4, grading: str = "graded"):
    """Dense-quadrature value of int_0^T t^{p(1-mu)} |cf|^p (the p-th power of the norm)."""
    p = wp.p
    a = wp.weight_exponent
    return dense_quadrature(lambda t: t**a * np.abs(cf(t)) ** p, T, levels, grading)


@cached("validated_weighted_lp")
def validated_weighted_lp(cf: ClosedForm, wp: WeightParams, T: float, rtol: float = GATE_RTOL) -> float:
    """exact_weighted_lp after the self-consistency gate (three dense resolutions).

    Raises:
        ProcessingError: when the closed form disagrees with the dense ladder
    """
    exact = exact_weighted_lp(cf, wp, T)
    dense = dense_weighted_lp(cf, wp, T, levels=3)
    reference = dense.extrapolated ** (1.0 / wp.p) if dense.extrapolated > 0.0 else 0.0
    check = validate_close(f"{cf.kind}({cf.param})", exact, reference, rtol=rtol)
    if not check.success:
        raise ProcessingError(
            f"closed form {cf.kind}({cf.param}) failed the self-consistency gate",
            operation="validated_weighted_lp",
            details={"exact": exact, "dense": reference, "errors": check.errors},
        )
    return exact


# ============================================================================
# Brute-force K-functional
# ============================================================================


@dataclass
class BruteForceK:
    value: float
    lower_bound: float
    gap: float
    residual: float
    split: np.ndarray

    def to_dict(self):
        return {"value": self.value, "lower_bound": self.lower_bound, "gap": self.gap, "residual": self.residual}


def _dual_lower_bound(alpha, beta, rho, t) -> float:
    """Best feasible dual value Re<z, u> built from either norm's gradient at the split."""
    A = math.sqrt(float(np.sum(alpha * rho**2)))
    B = math.sqrt(float(np.sum(beta * (1.0 - rho) ** 2)))
    best = 0.0
    # z = W0^2 a / A; needs |z / w1| <= t, i.e. ratio of alpha^2/beta weighted sums
    if A > 0.0:
        dual_y = math.sqrt(float(np.sum(np.where(beta > 0, alpha**2 * rho**2 / np.where(beta > 0, beta, 1.0), 0.0)))) / A
        scale = 1.0 / max(1.0, dual_y / t)
        best = max(best, scale * float(np.sum(alpha * rho)) / A)
    if B > 0.0:
        dual_x = t * math.sqrt(float(np.sum(np.where(alpha > 0, beta**2 * (1 - rho) ** 2 / np.where(alpha > 0, alpha, 1.0), 0.0)))) / B
        scale = 1.0 / max(1.0, dual_x)
        best = max(best, scale * t * float(np.sum(beta * (1.0 - rho))) / B)
    return best


def brute_force_k(u, weights0, weights1, t: float, starts: int = 4, seed: int = 0) -> BruteForceK:
    """Minimize |a|_X + t |b|_Y over splits u = a + b by bounded gradient projection.

    The optimum has a_k = rho_k u_k with rho in [0, 1]^n, so the search runs
    over that box (L-BFGS-B) from several starts plus the two corner splits.
    A dual feasible point certifies the result.

    Raises:
        ValidationError: more than 16 modes or t <= 0
        ConvergenceError: relative duality gap above 1e-6
    """
    u = np.asarray(u, dtype=complex).ravel()
    w0 = np.asarray(weights0, dtype=float).ravel()
    w1 = np.asarray(weights1, dtype=float).ravel()
    require(u.size <= BRUTE_MAX_MODES, f"brute force supports at most {BRUTE_MAX_MODES} modes", "brute_force_k")
    require(u.size == w0.size == w1.size, "coefficient and weight lengths differ", "brute_force_k")
    require(t > 0.0, "t must be positive", "brute_force_k")

    modulus = np.abs(u) ** 2
    alpha = w0**2 * modulus
    beta = w1**2 * modulus
    if not np.any(modulus > 0.0):
        return BruteForceK(0.0, 0.0, 0.0, 0.0, np.zeros(u.size))

    eps = 1e-30 * float(np.sum(alpha) + np.sum(beta))

    def objective(rho):
        A = math.sqrt(float(np.sum(alpha * rho**2)) + eps)
        B = math.sqrt(float(np.sum(beta * (1.0 - rho) ** 2)) + eps)
        grad = alpha * rho / A - t * beta * (1.0 - rho) / B
        return A + t * B, grad

    def exact_cost(rho):
        return math.sqrt(float(np.sum(alpha * rho**2))) + t * math.sqrt(float(np.sum(beta * (1.0 - rho) ** 2)))

    rng = np.random.default_rng(seed)
    quadratic = t * t * w1**2 / (w0**2 + t * t * w1**2)
    candidates = [np.zeros(u.size), np.ones(u.size), quadratic, np.full(u.size, 0.5)]
    candidates += [rng.uniform(0.0, 1.0, u.size) for _ in range(max(0, starts - 2))]

    best_rho = candidates[0]
    best_cost = exact_cost(best_rho)
    for start in candidates:
        result = optimize.minimize(
            objective,
            start,
            jac=True,
            method="L-BFGS-B",
            bounds=[(0.0, 1.0)] * u.size,
            options={"ftol": 1e-15, "gtol": 1e-13, "maxiter": 20000},
        )
        for rho in (start, np.clip(result.x, 0.0, 1.0)):
            cost = exact_cost(rho)
            if cost < best_cost:
                best_cost, best_rho = cost, rho

    _, grad = objective(best_rho)
    residual = float(np.max(np.abs(best_rho - np.clip(best_rho - grad, 0.0, 1.0))))
    lower = _dual_lower_bound(alpha, beta, best_rho, t)
    gap = (best_cost - lower) / best_cost if best_cost > 0.0 else 0.0
    if gap > BRUTE_GAP_TOL:
        raise ConvergenceError(
            f"brute-force K not certified: relative duality gap {gap:.2e}",
            operation="brute_force_k",
            details={"gap": gap, "residual": residual},
        )
    return BruteForceK(float(best_cost), float(lower), float(gap), residual, best_rho)


# ============================================================================
# Command handlers
# ============================================================================


def _reals(values) -> List[float]:
    if isinstance(values, (list, tuple)):
        return [float(v) for v in values]
    return [float(values)]


@safe_operation("oracle")
@handle_numeric_errors("oracle_weighted_lp")
def oracle_weighted_lp(kind, param, p, mu, T=1.0, coefficient=1.0):
    """Closed-form weighted L_p norm of a monomial, exponential, trig or gaussian."""
    cf = ClosedForm(str(kind), float(param), float(coefficient))
    return {"value": exact_weighted_lp(cf, WeightParams(float(p), float(mu)), float(T)), "form": cf.cache_key()}


@safe_operation("oracle")
@handle_numeric_errors("oracle_dense")
def oracle_dense(kind, param, p, mu, T=1.0, coefficient=1.0, levels=4):
    """Dense-quadrature ladder for the p-th power of the weighted L_p norm."""
    cf = ClosedForm(str(kind), float(param), float(coefficient))
    result = dense_weighted_lp(cf, WeightParams(float(p), float(mu)), float(T), int(levels))
    return dict(result.to_dict(), form=cf.cache_key())


@safe_operation("oracle")
@handle_numeric_errors("oracle_k_brute")
def oracle_k_brute(coefficients, weights0, weights1, t):
    """Certified brute-force K-functional of at most 16 real modes."""
    return brute_force_k(_reals(coefficients), _reals(weights0), _reals(weights1), float(t)).to_dict()
