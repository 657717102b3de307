"""
aniso Suites - registry of verification suites, the full battery, and the
parameter sweep manager that runs registered commands over a cartesian grid.
"""

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional

from ops.ensembles import (
    ENSEMBLE_SIZE,
    FieldEnsemble,
    band_limited_fields,
    bump_ensemble,
    default_grid,
    gaussian_ensemble,
    standard_ensemble,
    vanishing_ensemble,
)
from ops.grids import Grading, SpatialGrid, TimeDomain, WeightParams, make_graded_grid
from ops.report import FAIL, INCONCLUSIVE, PASS, VerificationReport
from ops.verify import (
    SPATIAL,
    SWEEP_TARGETS,
    TEMPORAL,
    UNWEIGHTED_TARGET,
    WEIGHTED_TARGET,
    ZERO_SPACE_ORDERS,
    EmbeddingQuery,
    TraceQuery,
    embeds,
    run_buc_suite,
    run_embedding_suite,
    run_extension_suite,
    run_fractional_algebra_suite,
    run_hardy_suite,
    run_interp_suite,
    run_local_embedding_suite,
    run_mixed_derivative_suite,
    run_phi_isometry_suite,
    run_poincare_suite,
    run_T_uniformity_sweep,
    run_trace_formula_suite,
    run_trace_suites,
    spatial_trace_ensemble,
    temporal_trace_ensemble,
    trace_space_order,
)
from utils.error_handling import UsageError, ValidationError, handle_numeric_errors, require, safe_operation
from utils.general import log_debug, log_info

# Sweep configs expand every list-valued key except these, which are passed through as lists
LIST_SUFFIX = "_values"


# ============================================================================
# Suite builders: (params, seed) -> VerificationReport
# ============================================================================


def _wp(params: Mapping) -> WeightParams:
    return WeightParams(float(params["p"]), float(params["mu"]))


def _size(params: Mapping) -> int:
    return int(params.get("size", ENSEMBLE_SIZE))


def _hardy(params: Mapping, seed: int) -> VerificationReport:
    wp = _wp(params)
    s = float(params["s"])
    ensemble = vanishing_ensemble(default_grid(1.0, int(params["n"])), wp, s, seed, _size(params))
    return run_hardy_suite(wp, ensemble, s)


def _poincare(params: Mapping, seed: int) -> VerificationReport:
    wp = _wp(params)
    s = float(params["s"])
    ensemble = vanishing_ensemble(default_grid(1.0, int(params["n"])), wp, s, seed, _size(params))
    return run_poincare_suite(wp, params["T_values"], ensemble, s)


def _embedding_query(params: Mapping) -> EmbeddingQuery:
    return EmbeddingQuery(
        float(params["p"]),
        float(params["q"]),
        float(params["mu"]),
        float(params["s"]),
        float(params["tau"]),
        str(params["variant"]),
    )


def _embedding(params: Mapping, seed: int) -> VerificationReport:
    ensemble = standard_ensemble(default_grid(1.0, int(params["n"])), seed, _size(params))
    return run_embedding_suite(_embedding_query(params), ensemble)


def _buc(params: Mapping, seed: int) -> VerificationReport:
    ensemble = standard_ensemble(default_grid(1.0, int(params["n"])), seed, _size(params))
    return run_buc_suite(_wp(params), float(params["s"]), int(params["k"]), ensemble)


def _local(params: Mapping, seed: int) -> VerificationReport:
    ensemble = standard_ensemble(default_grid(1.0, int(params["n"])), seed, _size(params))
    return run_local_embedding_suite(_wp(params), float(params["s"]), params["t0_values"], ensemble)


def _phi(params: Mapping, seed: int) -> VerificationReport:
    return run_phi_isometry_suite(standard_ensemble(default_grid(1.0, int(params["n"])), seed, _size(params)))


def _extension(params: Mapping, seed: int) -> VerificationReport:
    wp = _wp(params)
    s_values = [float(s) for s in params["s_values"]]
    ensemble = vanishing_ensemble(default_grid(1.0, int(params["n"])), wp, max(s_values), seed, _size(params))
    return run_extension_suite(wp, ensemble, s_values)


def _algebra(params: Mapping, seed: int) -> VerificationReport:
    ensemble = bump_ensemble(default_grid(1.0, int(params["n"])), seed, _size(params))
    return run_fractional_algebra_suite(ensemble, float(params["alpha"]), float(params["beta"]))


def _trace_formula(params: Mapping, seed: int) -> VerificationReport:
    T = float(params["T"])
    ensemble = gaussian_ensemble(default_grid(T, int(params["n"])), seed, _size(params))
    return run_trace_formula_suite(_wp(params), ensemble, T)


def _interp(params: Mapping, seed: int) -> VerificationReport:
    wp = _wp(params)
    s1, s2, theta = float(params["s1"]), float(params["s2"]), float(params["theta"])
    zero_extension = bool(params["zero_extension"])
    grid = default_grid(1.0, int(params["n"]))
    if zero_extension:
        ensemble = vanishing_ensemble(grid, wp, (1.0 - theta) * s1 + theta * s2, seed, _size(params))
    else:
        ensemble = standard_ensemble(grid, seed, _size(params))
    return run_interp_suite(wp, s1, s2, theta, ensemble, zero_extension)


def _mixed(params: Mapping, seed: int) -> VerificationReport:
    tgrid = default_grid(1.0, int(params["n_t"]))
    xgrid = SpatialGrid((int(params["n_x"]),))
    size = _size(params)
    ensemble = FieldEnsemble(lambda tg, xg, sd: band_limited_fields(tg, xg, sd, size), tgrid, xgrid, seed)
    return run_mixed_derivative_suite(params, _wp(params), ensemble)


def _trace_query(params: Mapping, variant: str) -> TraceQuery:
    return TraceQuery(
        variant,
        float(params["p"]),
        float(params["mu"]),
        s=float(params["s"]),
        alpha=float(params.get("alpha", 1.0)),
        r=float(params.get("r", 0.0)),
        beta=float(params.get("beta", 2.0)),
        k=int(params.get("k", 0)),
        m=int(params.get("m", 1)),
    )


def _trace_time(params: Mapping, seed: int) -> VerificationReport:
    q = _trace_query(params, str(params["variant"]))
    require(q.variant != SPATIAL, "the trace-time suite takes a temporal variant", "trace-time")
    tgrid = default_grid(1.0, int(params["n_t"]))
    xgrid = SpatialGrid((int(params["n_x"]),))
    return run_trace_suites(q, temporal_trace_ensemble(q, tgrid, xgrid, seed, int(params["size"])))


def _trace_space(params: Mapping, seed: int) -> VerificationReport:
    q = _trace_query(params, SPATIAL)
    tgrid = make_graded_grid(TimeDomain.periodic(float(params["T"])), int(params["n_t"]), Grading.uniform())
    half_grid = SpatialGrid((int(params["n_y"]),), half=True)
    return run_trace_suites(q, spatial_trace_ensemble(q, tgrid, half_grid, seed, int(params["size"])))


def resolve_sweep_target(name: str) -> str:
    """A T-sweep target: a ratio target name, or a registered suite with a vanishing-trace variant.

    Raises:
        ValidationError: the suite has no vanishing-trace variant
    """
    if name in SWEEP_TARGETS:
        return name
    definition = SUITES.get(name)
    if definition is None or not definition.supports_zero_variant:
        raise ValidationError(
            f"suite '{name}' has no vanishing-trace variant to sweep",
            operation="resolve_sweep_target",
            details={"targets": sorted(SWEEP_TARGETS), "suites": sorted(n for n, d in SUITES.items() if d.supports_zero_variant)},
        )
    return definition.sweep_target


def _t_sweep(params: Mapping, seed: int) -> VerificationReport:
    target = resolve_sweep_target(str(params["target"]))
    return run_T_uniformity_sweep(
        target,
        params["T_values"],
        wp=_wp(params),
        s_values=[float(s) for s in params["s_values"]],
        n=int(params["n"]),
        seed=seed,
        size=_size(params),
    )


# ============================================================================
# Registry
# ============================================================================


@dataclass(frozen=True)
class SuiteDefinition:
    """A runnable suite: builder plus its default parameters."""

    name: str
    builder: Callable[[Mapping, int], VerificationReport]
    defaults: Mapping[str, Any]
    description: str
    sweep_target: Optional[str] = None
    informational: bool = False

    @property
    def supports_zero_variant(self) -> bool:
        return self.sweep_target is not None

    @property
    def parameters(self) -> List[str]:
        return sorted(self.defaults)

    def resolve(self, overrides: Optional[Mapping[str, Any]] = None) -> Dict[str, Any]:
        """Defaults updated by overrides; unknown keys are usage errors."""
        overrides = dict(overrides or {})
        unknown = sorted(set(overrides) - set(self.defaults))
        if unknown:
            raise UsageError(
                f"Unknown parameters for suite '{self.name}': {', '.join(unknown)}",
                operation="SuiteDefinition.resolve",
                details={"unknown": unknown, "allowed": self.parameters},
            )
        merged = dict(self.defaults)
        for key, value in overrides.items():
            if value is None:
                continue
            if key.endswith(LIST_SUFFIX) and not isinstance(value, list):
                value = [value]
            merged[key] = value
        return merged

    def run(self, seed: int = 0, **params) -> VerificationReport:
        resolved = self.resolve(params)
        log_debug(f"suite {self.name}: seed={seed} params={resolved}")
        report = self.builder(resolved, int(seed))
        if self.informational and not report.informational:
            report.informational = True
        return report


def _suite(name, builder, description, sweep_target=None, informational=False, **defaults) -> SuiteDefinition:
    return SuiteDefinition(name, builder, defaults, description, sweep_target, informational)


SUITES: Dict[str, SuiteDefinition] = {
    definition.name: definition
    for definition in (
        _suite("hardy", _hardy, "Hardy inequality on vanishing-trace ensembles", p=2.0, mu=0.75, s=1.0, n=256, size=32),
        _suite(
            "poincare",
            _poincare,
            "Poincare inequality and its T^s scaling",
            p=2.0,
            mu=1.0,
            s=1.0,
            T_values=[0.25, 1.0, 4.0],
            n=256,
            size=16,
        ),
        _suite(
            "embedding",
            _embedding,
            "W^s_{p,mu} into W^tau_q",
            p=2.0,
            q=4.0,
            mu=1.0,
            s=0.8,
            tau=0.5,
            variant=WEIGHTED_TARGET,
            n=256,
            size=32,
        ),
        _suite(
            "witness",
            _embedding,
            "singular witness family at a violated embedding condition",
            informational=True,
            p=2.0,
            q=4.0,
            mu=1.0,
            s=0.6,
            tau=0.5,
            variant=UNWEIGHTED_TARGET,
            n=256,
            size=4,
        ),
        _suite(
            "mixed",
            _mixed,
            "mixed-derivative embedding of anisotropic spaces",
            p=2.0,
            mu=1.0,
            s=0.0,
            r=0.0,
            alpha=1.0,
            beta=2.0,
            sigma=0.5,
            n_t=128,
            n_x=128,
            size=8,
        ),
        _suite(
            "trace-time",
            _trace_time,
            "temporal trace on semigroup orbits",
            variant=TEMPORAL,
            p=2.0,
            mu=1.0,
            s=0.0,
            alpha=0.75,
            r=0.0,
            beta=2.0,
            k=0,
            n_t=128,
            n_x=32,
            size=4,
        ),
        _suite(
            "trace-space",
            _trace_space,
            "boundary trace of y-extensions of periodic data",
            p=2.0,
            mu=1.0,
            s=0.5,
            m=1,
            T=2.0 * math.pi,
            n_t=64,
            n_y=64,
            size=4,
        ),
        _suite(
            "interp",
            _interp,
            "real interpolation of H^{s1}/H^{s2} against W^s",
            p=2.0,
            mu=1.0,
            s1=0.0,
            s2=1.0,
            theta=0.5,
            zero_extension=0,
            n=256,
            size=32,
        ),
        _suite(
            "t-sweep",
            _t_sweep,
            "T-uniformity of extension operator norms",
            target="extend-zero",
            p=2.0,
            mu=1.0,
            s_values=list(ZERO_SPACE_ORDERS),
            T_values=[0.1, 1.0, 10.0],
            n=128,
            size=8,
        ),
        _suite("buc", _buc, "embedding into BUC^k", p=2.0, mu=1.0, s=1.0, k=0, n=256, size=32),
        _suite(
            "local",
            _local,
            "local unweighted embedding away from t = 0",
            p=2.0,
            mu=0.75,
            s=0.5,
            t0_values=[0.05, 0.1, 0.2, 0.4],
            n=256,
            size=16,
        ),
        _suite("phi", _phi, "weight isomorphism Phi_mu", n=256, size=32),
        _suite(
            "extension",
            _extension,
            "extension operators: restriction, continuity, support and norms",
            sweep_target="extend-zero",
            p=2.0,
            mu=1.0,
            s_values=list(ZERO_SPACE_ORDERS),
            n=256,
            size=16,
        ),
        _suite("algebra", _algebra, "fractional power semigroup law and H^1 against W^1", alpha=0.3, beta=0.5, n=256, size=8),
        _suite("trace-formula", _trace_formula, "temporal trace formula exactness and rate", p=2.0, mu=1.0, T=1.0, n=256, size=8),
    )
}


def get_suite(name: str) -> SuiteDefinition:
    if name not in SUITES:
        raise UsageError(f"unknown suite '{name}'", operation="get_suite", details={"known": sorted(SUITES)})
    return SUITES[name]


def list_suites() -> List[Dict[str, Any]]:
    return [
        {
            "suite": name,
            "description": definition.description,
            "parameters": definition.parameters,
            "supports_zero_variant": definition.supports_zero_variant,
            "informational": definition.informational,
        }
        for name, definition in sorted(SUITES.items())
    ]


def run_suite(name: str, seed: int = 0, params: Optional[Mapping[str, Any]] = None) -> VerificationReport:
    return get_suite(name).run(seed, **dict(params or {}))


# ============================================================================
# Battery
# ============================================================================


def overall_verdict(reports: List[VerificationReport]) -> str:
    """fail if any binding report fails, inconclusive if any is inconclusive, pass otherwise."""
    binding = [report.verdict for report in reports if not report.informational]
    if FAIL in binding:
        return FAIL
    if INCONCLUSIVE in binding:
        return INCONCLUSIVE
    return PASS


def run_battery(seed: int = 0, suites: Optional[List[str]] = None) -> List[VerificationReport]:
    """Every registered suite (or the named ones) at default parameters, in registry order."""
    names = list(SUITES) if suites is None else [get_suite(name).name for name in suites]
    reports = []
    for name in names:
        report = SUITES[name].run(seed)
        log_info(f"battery {name}: {report.verdict}")
        reports.append(report)
    log_info(f"battery: {overall_verdict(reports)} over {len(reports)} suites")
    return reports


# ============================================================================
# Command handlers
# ============================================================================


def _verify_handler(definition: SuiteDefinition) -> Callable[..., Dict[str, Any]]:
    @safe_operation("verify")
    @handle_numeric_errors(f"verify_{definition.name}")
    def handler(seed: int = 0, **params):
        report = definition.run(seed, **params)
        return {"verdict": report.verdict, "report": report.to_dict()}

    handler.__doc__ = f"Run the {definition.name} suite: {definition.description}"
    return handler


def verify_commands() -> Dict[str, tuple]:
    """Command name -> (handler, parameter names) for every suite."""
    return {
        f"verify_{name.replace('-', '_')}": (_verify_handler(definition), ["seed"] + definition.parameters)
        for name, definition in SUITES.items()
    }


@safe_operation("predicate")
def embeds_command(p, q, mu, s, tau, variant=WEIGHTED_TARGET):
    """Whether W^s_{p,mu} embeds into W^tau_q."""
    query = EmbeddingQuery(float(p), float(q), float(mu), float(s), float(tau), str(variant))
    return {"embeds": embeds(query), "query": query.describe()}


@safe_operation("predicate")
def trace_order_command(variant, p, mu, s=0.0, alpha=1.0, r=0.0, beta=2.0, k=0, m=1):
    """Order of the trace space for a trace query."""
    query = TraceQuery(str(variant), float(p), float(mu), float(s), float(alpha), float(r), float(beta), int(k), int(m))
    order = trace_space_order(query)
    return {"order": list(order) if isinstance(order, tuple) else order, "query": query.describe()}


# ============================================================================
# Sweeps
# ============================================================================


def expand_grid(params: Mapping[str, Any]) -> List[Dict[str, Any]]:
    """Cartesian product of the list-valued keys, in sorted key order.

    Keys ending in LIST_SUFFIX keep their list value.
    """
    keys = sorted(params)
    axes = []
    for key in keys:
        value = params[key]
        if isinstance(value, list) and not key.endswith(LIST_SUFFIX):
            require(len(value) > 0, f"sweep axis '{key}' is empty", "expand_grid")
            axes.append(value)
        else:
            axes.append([value])
    return [dict(zip(keys, combination)) for combination in itertools.product(*axes)]


@dataclass
class SweepManager:
    """Runs one registered command over every point of a parameter grid."""

    dispatch: Optional[Callable[[str, Dict[str, Any]], Dict[str, Any]]] = None
    history: List[Dict[str, Any]] = field(default_factory=list)

    def execute_batch(self, operations: List[Dict[str, Any]]) -> Dict[str, Any]:
        """Execute operations in order.

        Args:
            operations: List of {"id", "operation", "params"} dicts

        Returns:
            Dictionary with per-operation results and success/failure counts
        """
        if self.dispatch is None:
            from aniso_command_registry import dispatch_command

            self.dispatch = dispatch_command

        results = []
        success_count = 0
        failure_count = 0
        for index, operation in enumerate(operations):
            op_id = operation.get("id", index)
            name = operation.get("operation")
            params = operation.get("params", {})
            if not name:
                results.append({"id": op_id, "success": False, "error": "Operation name is required"})
                failure_count += 1
                continue
            if not isinstance(params, dict):
                results.append({"id": op_id, "operation": name, "success": False, "error": "params must be a dict"})
                failure_count += 1
                continue

            result = self.dispatch(name, params)
            ran = bool(result.get("success", False))
            succeeded = ran and result.get("verdict") != FAIL
            entry = {"id": op_id, "operation": name, "params": params, "success": succeeded}
            if ran:
                entry["result"] = result
            else:
                entry["error"] = result.get("error", "unknown error")
            results.append(entry)
            if succeeded:
                success_count += 1
            else:
                failure_count += 1
            log_debug(f"sweep {op_id} {name}: {'ok' if succeeded else 'failed'}")

        summary = {
            "success": failure_count == 0,
            "operations": results,
            "successCount": success_count,
            "failureCount": failure_count,
        }
        self.history.append({"count": len(operations), "successCount": success_count, "failureCount": failure_count})
        return summary

    def execute_sweep(self, command: str, params: Mapping[str, Any]) -> Dict[str, Any]:
        """Expand params into a grid and run command at every point, in grid order."""
        points = expand_grid(params)
        log_info(f"sweep {command}: {len(points)} points")
        operations = [{"id": index, "operation": command, "params": point} for index, point in enumerate(points)]
        summary = self.execute_batch(operations)
        summary["command"] = command
        return summary


_sweep_manager = None


def get_sweep_manager() -> SweepManager:
    global _sweep_manager
    if _sweep_manager is None:
        _sweep_manager = SweepManager()
    return _sweep_manager


def execute_sweep(command: str, params: Dict[str, Any]) -> Dict[str, Any]:
    """Run a registered command over the cartesian grid of params."""
    return get_sweep_manager().execute_sweep(command, params)
