"""
aniso Interpolation - discrete K-functionals and real interpolation norms for
couples diagonalized by Fourier modes.

A couple (X, Y) is given by positive multipliers w0, w1 over a shared set of
spectral coefficients: |u|_X^2 = sum w0^2 |u_k|^2, |u|_Y^2 = sum w1^2 |u_k|^2.
"""

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy import integrate, optimize

from ops import spectral
from ops.ensembles import member_name, two_resolutions
from ops.grids import SampledFunction, WeightParams
from ops.norms import W, NormResult, SpaceSpec, fractional_norm
from ops.operators import extend_zero, phi_mu
from ops.report import Instance, VerificationReport, build_report, ratio_of
from utils.error_handling import NumericRangeRule, ValidationError, require, validate_inputs
from utils.general import log_debug, log_info
from utils.parallel import parallel_map

QUADRATIC_EXACT = "quadratic_exact"
COORDINATE_DESCENT = "coordinate_descent"
K_MODES = (QUADRATIC_EXACT, COORDINATE_DESCENT)

K_POINTS = 160
T_MIN = 1e-6
T_MAX = 1e6
MIN_ENSEMBLE = 8

# Search window (in log s around the quadratic split) and scan step for the scalar condition
SPLIT_WINDOW = 80.0
SPLIT_SCAN_STEP = 4.0
BRACKET_RTOL = 1e-12
PROFILE_RTOL = 1e-10

INTERP_BRACKET = (1.0 / 3.0, 3.0)
IDENTITY_RTOL = 1e-8
REITERATION_RTOL = 1e-6


# ============================================================================
# Couples
# ============================================================================


@dataclass(frozen=True, eq=False)
class DiagonalCouple:
    """Positive multipliers (w0, w1) of |.|_X and |.|_Y over shared modes."""

    weights0: np.ndarray
    weights1: np.ndarray

    def __post_init__(self):
        w0 = np.asarray(self.weights0, dtype=float).ravel()
        w1 = np.asarray(self.weights1, dtype=float).ravel()
        require(w0.size == w1.size and w0.size > 0, "couple weights must have the same nonzero length", "DiagonalCouple")
        require(bool(np.all(w0 > 0.0) and np.all(w1 > 0.0)), "couple weights must be positive", "DiagonalCouple")
        require(bool(np.all(np.isfinite(w0)) and np.all(np.isfinite(w1))), "couple weights must be finite", "DiagonalCouple")
        object.__setattr__(self, "weights0", w0)
        object.__setattr__(self, "weights1", w1)

    @classmethod
    def from_orders(cls, xi, s1: float, s2: float) -> "DiagonalCouple":
        """H^{s1} / H^{s2} couple with weights |1 - i xi|^{s_j}."""
        base = 1.0 + np.asarray(xi, dtype=float) ** 2
        return cls(base ** (0.5 * s1), base ** (0.5 * s2))

    @property
    def size(self) -> int:
        return int(self.weights0.size)

    @property
    def is_degenerate(self) -> bool:
        """X = Y."""
        return bool(np.array_equal(self.weights0, self.weights1))

    def norm_x(self, u) -> float:
        return float(np.sqrt(np.sum(self.weights0**2 * np.abs(u) ** 2)))

    def norm_y(self, u) -> float:
        return float(np.sqrt(np.sum(self.weights1**2 * np.abs(u) ** 2)))

    def intermediate_weights(self, theta: float) -> np.ndarray:
        """Multipliers of (X, Y)_{theta,2} with the normalized quadratic K-norm.

        Mode-wise the norm is g(theta)^{1/2} w0^{1-theta} w1^theta with
        g(theta) = theta (1 - theta) pi / sin(pi theta).
        """
        require(0.0 < theta < 1.0, "theta must lie in (0, 1)", "intermediate_weights")
        return math.sqrt(_quadratic_gain(theta)) * self.weights0 ** (1.0 - theta) * self.weights1**theta


def _quadratic_gain(theta: float) -> float:
    return theta * (1.0 - theta) * math.pi / math.sin(math.pi * theta)


def _coefficients(u, couple: DiagonalCouple) -> np.ndarray:
    u = np.asarray(u, dtype=complex).ravel()
    require(u.size == couple.size, f"{u.size} coefficients for a couple of size {couple.size}", "k_functional")
    return u


# ============================================================================
# K-functional
# ============================================================================


def _quadratic_k(modulus: np.ndarray, couple: DiagonalCouple, ts: np.ndarray) -> np.ndarray:
    """K_2(t) = (sum |u|^2 w0^2 t^2 w1^2 / (w0^2 + t^2 w1^2))^{1/2} for every t."""
    w0sq = couple.weights0**2
    w1sq = couple.weights1**2
    t2 = (ts * ts)[:, None]
    terms = modulus[None, :] * w0sq[None, :] * t2 * w1sq[None, :] / (w0sq[None, :] + t2 * w1sq[None, :])
    return np.sqrt(np.sum(terms, axis=1))


class _SplitCurve:
    """Costs along the splits a_k = rho_k(s) u_k, rho_k(s) = s w1^2 / (w0^2 + s w1^2)."""

    def __init__(self, modulus: np.ndarray, couple: DiagonalCouple, t: float):
        self.alpha = couple.weights0**2 * modulus
        self.beta = couple.weights1**2 * modulus
        self.w0sq = couple.weights0**2
        self.w1sq = couple.weights1**2
        self.t = t

    def scales(self, x: float) -> Tuple[float, float]:
        """(|a|_X, |b|_Y) at s = e^x."""
        s = math.exp(x)
        denominator = self.w0sq + s * self.w1sq
        rho = s * self.w1sq / denominator
        rest = self.w0sq / denominator
        return math.sqrt(float(np.sum(self.alpha * rho * rho))), math.sqrt(float(np.sum(self.beta * rest * rest)))

    def cost(self, x: float) -> float:
        A, B = self.scales(x)
        return A + self.t * B

    def condition(self, x: float) -> float:
        """log(s B) - log(t A); its sign is the sign of d cost / ds."""
        A, B = self.scales(x)
        if A == 0.0 or B == 0.0:
            return 0.0
        return x + math.log(B) - math.log(self.t) - math.log(A)


def _coordinate_descent_k(modulus: np.ndarray, couple: DiagonalCouple, t: float) -> float:
    """inf |a|_X + t |b|_Y over splits u = a + b.

    Alternating between the split and the two norm scales (A, B) fixes the
    split to the curve rho_k(s) with s = t A / B. Along that curve the cost
    derivative has the sign of s B - t A, so its zero is the minimizer; when
    the sign never changes an endpoint split (a = 0 or b = 0) is optimal.
    """
    curve = _SplitCurve(modulus, couple, t)
    start = 2.0 * math.log(t)
    candidates = [
        math.sqrt(float(np.sum(curve.alpha))),
        t * math.sqrt(float(np.sum(curve.beta))),
        curve.cost(start),
    ]
    grid = np.arange(start - SPLIT_WINDOW, start + SPLIT_WINDOW + SPLIT_SCAN_STEP, SPLIT_SCAN_STEP)
    signs = np.array([curve.condition(x) for x in grid])
    crossings = np.flatnonzero((signs[:-1] < 0.0) & (signs[1:] >= 0.0))
    if crossings.size:
        lo = grid[crossings[0]]
        hi = grid[crossings[0] + 1]
        root = optimize.brentq(curve.condition, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
        candidates.append(curve.cost(root))
    return float(min(candidates))


@validate_inputs({"t": [NumericRangeRule(0.0, None, exclusive=True)]})
def k_functional(u, couple: DiagonalCouple, t: float, mode: str = QUADRATIC_EXACT) -> float:
    """K(t, u) of a diagonal couple.

    quadratic_exact: K_2(t,u) = inf (|a|_X^2 + t^2 |b|_Y^2)^{1/2}, mode-wise closed form.
    coordinate_descent: the true K(t,u) = inf |a|_X + t |b|_Y; on a degenerate
    couple it is min(1, t) |u|_X exactly.

    K_2 <= K <= sqrt(2) K_2 for both.

    Raises:
        ValidationError: t <= 0 or an unknown mode
    """
    require(mode in K_MODES, f"unknown K mode '{mode}', expected one of {K_MODES}", "k_functional")
    coefficients = _coefficients(u, couple)
    modulus = np.abs(coefficients) ** 2
    if not np.any(modulus > 0.0):
        return 0.0
    if mode == QUADRATIC_EXACT:
        return float(_quadratic_k(modulus, couple, np.array([float(t)]))[0])
    if couple.is_degenerate:
        return min(1.0, float(t)) * couple.norm_x(coefficients)
    return _coordinate_descent_k(modulus, couple, float(t))


def _k_values(coefficients: np.ndarray, couple: DiagonalCouple, ts: np.ndarray, mode: str) -> np.ndarray:
    modulus = np.abs(coefficients) ** 2
    if not np.any(modulus > 0.0):
        return np.zeros(ts.size)
    if mode == QUADRATIC_EXACT:
        return _quadratic_k(modulus, couple, ts)
    if couple.is_degenerate:
        return np.minimum(1.0, ts) * couple.norm_x(coefficients)
    return np.array([_coordinate_descent_k(modulus, couple, float(t)) for t in ts])


@dataclass
class KProfile:
    ts: np.ndarray
    values: np.ndarray
    nondecreasing: bool
    concave: bool
    ratio_nonincreasing: bool

    @property
    def holds(self) -> bool:
        return self.nondecreasing and self.concave and self.ratio_nonincreasing

    def failures(self) -> List[str]:
        names = (("nondecreasing", self.nondecreasing), ("concave", self.concave), ("K/t nonincreasing", self.ratio_nonincreasing))
        return [name for name, ok in names if not ok]


def _profile_checks(ts: np.ndarray, values: np.ndarray, rtol: float = PROFILE_RTOL) -> KProfile:
    scale = float(np.max(values)) if values.size else 0.0
    slack = rtol * scale
    steps = np.diff(values)
    nondecreasing = bool(np.all(steps >= -slack))
    slopes = steps / np.diff(ts)
    concave = bool(np.all(slopes[1:] <= slopes[:-1] + slack / np.diff(ts)[1:]))
    ratios = values / ts
    ratio_nonincreasing = bool(np.all(np.diff(ratios) <= slack / ts[1:]))
    return KProfile(ts, values, nondecreasing, concave, ratio_nonincreasing)


def k_functional_profile(u, couple: DiagonalCouple, ts=None, mode: str = COORDINATE_DESCENT) -> KProfile:
    """K on a t-grid (the interpolation quadrature grid by default) with the
    monotonicity, concavity and K/t checks."""
    require(mode in K_MODES, f"unknown K mode '{mode}'", "k_functional_profile")
    ts = quadrature_points() if ts is None else np.asarray(ts, dtype=float)
    require(ts.ndim == 1 and ts.size >= 3 and bool(np.all(ts > 0.0)), "ts must hold >= 3 positive points", "k_functional_profile")
    require(bool(np.all(np.diff(ts) > 0.0)), "ts must be increasing", "k_functional_profile")
    values = _k_values(_coefficients(u, couple), couple, ts, mode)
    return _profile_checks(ts, values)


# ============================================================================
# Real interpolation norms
# ============================================================================


def quadrature_points(points: int = K_POINTS) -> np.ndarray:
    return np.geomspace(T_MIN, T_MAX, points)


def _interp_integral(coefficients, couple: DiagonalCouple, theta: float, p: float, mode: str, points: int):
    """(NormResult, ts, K values) for (int (t^-theta K)^p dt/t)^{1/p}."""
    ts = quadrature_points(points)
    ks = _k_values(coefficients, couple, ts, mode)
    logs = np.log(ts)
    integrand = (ts ** (-theta) * ks) ** p

    body = float(integrate.trapezoid(integrand, logs))
    coarse_body = float(integrate.trapezoid(integrand[::2], logs[::2]))
    lower_tail = T_MIN ** (p * (1.0 - theta)) / (p * (1.0 - theta)) * couple.norm_y(coefficients) ** p
    upper_tail = T_MAX ** (-p * theta) / (p * theta) * couple.norm_x(coefficients) ** p

    value = (body + lower_tail + upper_tail) ** (1.0 / p)
    coarse = (coarse_body + lower_tail + upper_tail) ** (1.0 / p)
    result = NormResult(
        value,
        couple.size,
        abs(value - coarse),
        {"body": body, "lower_tail": lower_tail, "upper_tail": upper_tail},
        {"t_min": T_MIN, "t_max": T_MAX},
    )
    return result, ts, ks


@validate_inputs({"theta": [NumericRangeRule(0.0, 1.0, exclusive=True)], "p": [NumericRangeRule(1.0, None)]})
def real_interp_norm(u, couple: DiagonalCouple, theta: float, p: float, mode: str = COORDINATE_DESCENT, points: int = K_POINTS):
    """|u|_{(X,Y)_{theta,p}} = (int_0^inf (t^-theta K(t,u))^p dt/t)^{1/p}.

    Trapezoid rule in log t over [1e-6, 1e6] plus the tails with K ~ t |u|_Y
    below and K ~ |u|_X above. A degenerate couple uses the closed form
    (p theta (1 - theta))^{-1/p} |u|_X.

    Raises:
        ValidationError: theta outside (0, 1)
    """
    require(mode in K_MODES, f"unknown K mode '{mode}'", "real_interp_norm")
    require(math.isfinite(p), "p must be finite", "real_interp_norm")
    coefficients = _coefficients(u, couple)
    if couple.is_degenerate and mode == COORDINATE_DESCENT:
        value = (p * theta * (1.0 - theta)) ** (-1.0 / p) * couple.norm_x(coefficients)
        return NormResult(value, couple.size, 0.0, {"closed_form": value})
    result, _, _ = _interp_integral(coefficients, couple, theta, p, mode, points)
    return result


def normalization(theta: float, p: float) -> float:
    return (p * theta * (1.0 - theta)) ** (1.0 / p)


def normalized_interp_norm(u, couple: DiagonalCouple, theta: float, p: float, mode: str = COORDINATE_DESCENT):
    """(p theta (1 - theta))^{1/p} real_interp_norm, so (X, X)_{theta,p} = X isometrically."""
    raw = real_interp_norm(u, couple, theta, p, mode)
    c = normalization(theta, p)
    return NormResult(c * raw.value, raw.resolution, c * raw.est_error, raw.components, raw.truncation)


# ============================================================================
# Spectral coefficients of sampled data
# ============================================================================


def spectral_coefficients(u: SampledFunction, wp: WeightParams, zero_extension: bool = False):
    """Parseval-normalized Fourier coefficients of Phi_mu u on its torus.

    With zero_extension the continuation past T is the vanishing-trace
    extension (data on (0, 2T), zero beyond) instead of the reflection.

    Returns:
        (xi, coefficients) with sum |c_k|^2 = int over the torus of |Phi_mu u|^2
    """
    require(u.d == 1, "spectral coefficients need scalar data", "spectral_coefficients")
    transformed = phi_mu(u, wp)
    if zero_extension:
        transformed = extend_zero(transformed, wp.unweighted())
    signal = spectral.periodize(transformed)
    coefficients = np.fft.fft(signal.values[:, 0]) * math.sqrt(signal.spacing / signal.n)
    return signal.frequencies(), coefficients


# ============================================================================
# Identity checks
# ============================================================================


def _k_bracket_failures(coefficients, couple: DiagonalCouple, ts: np.ndarray, ks: np.ndarray) -> List[str]:
    k2 = _quadratic_k(np.abs(coefficients) ** 2, couple, ts)
    slack = 1.0 + BRACKET_RTOL
    failures = []
    if np.any(k2 > ks * slack):
        failures.append("K_2 > K_cd")
    if np.any(ks > math.sqrt(2.0) * k2 * slack):
        failures.append("K_cd > sqrt(2) K_2")
    return failures


def _identity_ratio(u: SampledFunction, wp, s1, s2, theta, p, zero_extension):
    xi, coefficients = spectral_coefficients(u, wp, zero_extension)
    couple = DiagonalCouple.from_orders(xi, s1, s2)
    c = normalization(theta, p)
    failures: List[str] = []
    if couple.is_degenerate:
        lhs = c * real_interp_norm(coefficients, couple, theta, p).value
        rhs = couple.norm_x(coefficients)
    else:
        result, ts, ks = _interp_integral(coefficients, couple, theta, p, COORDINATE_DESCENT, K_POINTS)
        lhs = c * result.value
        s = (1.0 - theta) * s1 + theta * s2
        rhs = fractional_norm(u, SpaceSpec(W, s, wp), estimate=False).value
        failures = _k_bracket_failures(coefficients, couple, ts, ks)
        failures += _profile_checks(ts, ks).failures()
    return lhs, rhs, failures


@validate_inputs({"theta": [NumericRangeRule(0.0, 1.0, exclusive=True)]})
def check_interp_identity(
    ensemble: Sequence,
    wp: WeightParams,
    s1: float,
    s2: float,
    theta: float,
    *,
    zero_extension: bool = False,
    bracket: Tuple[float, float] = INTERP_BRACKET,
    suite: str = "interp",
) -> VerificationReport:
    """Ratios of the normalized (H^{s1}, H^{s2})_{theta,p} norm of Phi_mu u to |u|_{W^s_{p,mu}}.

    s = (1 - theta) s1 + theta s2. With s1 = s2 both sides are the H^{s1}
    norm and every ratio is 1. Each member is measured at its resolution and
    after one refinement; the K bracket and the K profile invariants are hard
    checks on every member.

    Raises:
        ValidationError: fewer than 8 members, or s integral for the W target
    """
    members = list(ensemble)
    if len(members) < MIN_ENSEMBLE:
        raise ValidationError(
            f"interpolation checks need at least {MIN_ENSEMBLE} functions, got {len(members)}",
            operation="check_interp_identity",
        )
    degenerate = s1 == s2
    s = (1.0 - theta) * s1 + theta * s2
    if not degenerate and float(s).is_integer():
        raise ValidationError(f"s = {s} is an integer: the W target is not a Slobodetskii space", operation="check_interp_identity")
    p = wp.p

    def measure(indexed):
        index, member = indexed
        coarse, fine = two_resolutions(member)
        lhs, rhs, failures = _identity_ratio(coarse, wp, s1, s2, theta, p, zero_extension)
        fine_lhs, fine_rhs, _ = _identity_ratio(fine, wp, s1, s2, theta, p, zero_extension)
        ratio = ratio_of(lhs, rhs)
        fine_ratio = ratio_of(fine_lhs, fine_rhs)
        drift = abs(fine_ratio / ratio - 1.0) if ratio > 0.0 else 0.0
        name = member_name(member, index)
        log_debug(f"interp {name}: ratio={ratio:.6g} drift={drift:.3g}")
        params = {"member": name, "s1": s1, "s2": s2, "theta": theta, "p": p, "mu": wp.mu}
        return Instance(params, lhs, rhs, ratio, coarse.grid.n, drift), [f"{name}: {f}" for f in failures]

    measured = parallel_map(measure, list(enumerate(members)))
    instances = [inst for inst, _ in measured]
    hard_failures = [f for _, failures in measured for f in failures]
    if degenerate:
        lower, upper = 1.0 - IDENTITY_RTOL, 1.0 + IDENTITY_RTOL
    else:
        lower, upper = bracket
    report = build_report(
        suite,
        instances,
        upper,
        lower=lower,
        hard_failures=hard_failures,
        notes={"s": s, "zero_extension": zero_extension, "k_points": K_POINTS},
    )
    log_info(f"{suite}: {report.verdict} worst_ratio={report.worst_ratio:.6g}")
    return report


@validate_inputs(
    {
        "theta1": [NumericRangeRule(0.0, 1.0, exclusive=True)],
        "theta2": [NumericRangeRule(0.0, 1.0, exclusive=True)],
        "eta": [NumericRangeRule(0.0, 1.0, exclusive=True)],
    }
)
def check_reiteration(
    ensemble: Sequence, couple: DiagonalCouple, theta1: float, theta2: float, eta: float, p: float = 2.0
) -> VerificationReport:
    """((X,Y)_{theta1,p}, (X,Y)_{theta2,p})_{eta,p} against (X,Y)_{theta,p}, theta = (1-eta) theta1 + eta theta2.

    The intermediate spaces use their mode-wise quadratic representation, so
    every ratio equals the same constant; the report brackets it tightly.

    Raises:
        ValidationError: p != 2 or theta1 == theta2
    """
    require(p == 2.0, "the diagonal representation of intermediate spaces needs p = 2", "check_reiteration")
    require(theta1 != theta2, "theta1 and theta2 must differ", "check_reiteration")
    members = [np.asarray(u, dtype=complex) for u in ensemble]
    require(len(members) > 0, "ensemble must not be empty", "check_reiteration")
    theta = (1.0 - eta) * theta1 + eta * theta2
    inner = DiagonalCouple(couple.intermediate_weights(theta1), couple.intermediate_weights(theta2))
    expected = math.sqrt(
        _quadratic_gain(eta) * _quadratic_gain(theta1) ** (1.0 - eta) * _quadratic_gain(theta2) ** eta / _quadratic_gain(theta)
    )

    instances = []
    for index, coefficients in enumerate(members):
        lhs = normalized_interp_norm(coefficients, inner, eta, p, QUADRATIC_EXACT).value
        rhs = normalized_interp_norm(coefficients, couple, theta, p, QUADRATIC_EXACT).value
        params = {"member": f"c{index}", "theta1": theta1, "theta2": theta2, "eta": eta}
        instances.append(Instance(params, lhs, rhs, ratio_of(lhs, rhs), couple.size))
    return build_report(
        "reiteration",
        instances,
        expected * (1.0 + REITERATION_RTOL),
        lower=expected * (1.0 - REITERATION_RTOL),
        notes={"expected_ratio": expected, "theta": theta},
    )

