"""
aniso CLI - norm queries, operator application, verification suites,
parameter sweeps, oracle queries and report rendering.

Exit codes: 0 pass, 1 failure, 2 inconclusive, 64 usage error, 65 data format error.
"""

import argparse
import json
import os
import sys
from typing import Any, Dict, List, Mapping, Optional, Sequence

import numpy as np

from aniso_command_registry import dispatch_command, get_registry
from ops.ensembles import build_ensemble, default_grid, load_ensemble_dir
from ops.grids import DOMAIN_KINDS, FINITE, SampledFunction, SpaceTimeField, WeightParams, make_graded_grid, resample
from ops.norms import FAMILIES, SpaceSpec, fractional_norm
from ops.operators import (
    LAPLACIAN,
    RIGHT_INVERSE_Y_SPACING,
    TIME_DERIV_MINUS,
    FractionalOperatorSpec,
    SumOperatorSpec,
    extend_general,
    extend_zero,
    fractional_apply,
    phi_mu,
    trace_rightinverse_S,
    trace_t0,
    trace_t0_diagnostic,
    trace_y0,
    trace_y0_rightinverse,
    translate,
)
from ops.report import FAIL, INCONCLUSIVE, PASS, format_value, render_report
from ops.suites import SUITES, execute_sweep, get_suite, overall_verdict, run_battery
from ops.verify import run_interp_suite
from utils.config import load_run_config, read_config_file
from utils.csv_io import read_field, read_sampled_function, write_field, write_sampled_function
from utils.error_handling import AnisoError, DataFormatError, UsageError, ValidationError
from utils.general import configure_logging, log_info
from version import get_version_string

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 64
EXIT_DATA_FORMAT = 65

VERDICT_EXIT = {PASS: EXIT_PASS, FAIL: EXIT_FAIL, INCONCLUSIVE: EXIT_INCONCLUSIVE}

OPERATORS = ("phi-mu", "extend0", "extend", "translate", "fracderiv", "laplacian", "trace-t0", "trace-y0", "rinv-S", "rinv-y0")
FIELD_INPUT_OPERATORS = ("laplacian", "trace-y0", "rinv-S")
OP_DEFAULTS = {
    "p": 2.0,
    "mu": 1.0,
    "order": 1.0,
    "shift": 1.0,
    "t0": 0.0,
    "k": 3,
    "sigma": None,
    "m": 1,
    "n_y": 8,
    "y_spacing": RIGHT_INVERSE_Y_SPACING,
}
NORM_DEFAULTS = {"family": "W", "s": 0.0, "p": 2.0, "mu": 1.0, "grid_n": None}
INTERP_DEFAULTS = {"s1": 0.0, "s2": 1.0, "theta": 0.5, "p": 2.0, "mu": 1.0, "ensemble": "standard", "n": 256, "zero_extension": 0}
ORACLE_QUERIES = {"weighted-lp": "oracle_weighted_lp", "dense": "oracle_dense", "k-brute": "oracle_k_brute"}


class ArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors raised as UsageError (its own exit 2 means inconclusive here)."""

    def error(self, message):
        raise UsageError(message, operation=self.prog, details={"usage": self.format_usage()})


# ============================================================================
# Artifacts
# ============================================================================


def artifact(payload: Mapping[str, Any], seed: int, resolution: int) -> Dict[str, Any]:
    """payload plus version, seed and resolution, reals as decimal strings."""
    data = dict(format_value(dict(payload)))
    data.update({"version": get_version_string(), "seed": int(seed), "resolution": int(resolution)})
    return data


def dumps(data: Mapping[str, Any]) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def write_json(path: str, data: Mapping[str, Any]) -> None:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(dumps(data))


def _emit(data: Mapping[str, Any], path: Optional[str]) -> None:
    if path:
        write_json(path, data)
    else:
        sys.stdout.write(dumps(data))


def _read_function_or_field(path: str, domain: str):
    """A `t,v1..` CSV as a SampledFunction, a `t,x,v` CSV as a field."""
    with open(_require_input(path), encoding="utf-8") as handle:
        header = handle.readline().strip().replace(" ", "")
    if header.startswith("t,x"):
        return read_field(path, domain_kind=domain)
    return read_sampled_function(path, domain)


def _require_input(path: str) -> str:
    if not os.path.exists(path):
        raise UsageError(f"input file not found: {path}", operation="read_input")
    return path


# ============================================================================
# Subcommands
# ============================================================================


def cmd_norm(args) -> int:
    flags = {"family": args.family, "s": args.s, "p": args.p, "mu": args.mu, "grid_n": args.grid_n}
    config = load_run_config("norm", flags, args.config, NORM_DEFAULTS, seed=0)
    params = dict(NORM_DEFAULTS, **config.params)
    if params["family"] not in FAMILIES:
        raise UsageError(f"unknown family '{params['family']}', expected one of {FAMILIES}", operation="norm")

    u = read_sampled_function(_require_input(args.input), args.domain)
    if params["grid_n"]:
        grid = make_graded_grid(u.grid.domain, int(params["grid_n"]))
        u = SampledFunction(grid, resample(u, grid.nodes))
    spec = SpaceSpec(params["family"], float(params["s"]), WeightParams(float(params["p"]), float(params["mu"])))
    result = fractional_norm(u, spec)

    sys.stdout.write(f"{spec.family}^{spec.s:g} p={spec.wp.p:g} mu={spec.wp.mu:g}: {result.to_dict()['value']}\n")
    for name, value in sorted(result.to_dict()["components"].items()):
        sys.stdout.write(f"  {name}: {value}\n")
    if args.report:
        write_json(args.report, artifact({"spec": spec.describe(), "norm": result.to_dict()}, config.seed, result.resolution))
    return EXIT_PASS


def _apply_operator(name: str, params: Mapping[str, Any], data):
    wp = WeightParams(float(params["p"]), float(params["mu"]))
    if name == "phi-mu":
        return phi_mu(data, wp)
    if name == "extend0":
        return extend_zero(data, wp)
    if name == "extend":
        return extend_general(data, int(params["k"]))
    if name == "translate":
        return translate(data, float(params["t0"]))
    if name == "fracderiv":
        return fractional_apply(data, FractionalOperatorSpec(TIME_DERIV_MINUS, float(params["order"]), float(params["shift"])))
    if name == "laplacian":
        return fractional_apply(data, FractionalOperatorSpec(LAPLACIAN, float(params["order"]), float(params["shift"])))
    if name == "trace-t0":
        sigma = params["sigma"]
        values = trace_t0(data, wp, None if sigma is None else float(sigma))
        return {"trace": values, "diagnostic": trace_t0_diagnostic(data, wp).to_dict()}
    if name == "trace-y0":
        return trace_y0(data)
    m = int(params["m"])
    if name == "rinv-S":
        return trace_rightinverse_S(data.at_time(0), m, data.tgrid)
    spec = SumOperatorSpec.parabolic(m)
    return trace_y0_rightinverse(data, spec, m, n_y=int(params["n_y"]), y_spacing=float(params["y_spacing"]))


def cmd_op(args) -> int:
    flags = {
        "p": args.p,
        "mu": args.mu,
        "order": args.order,
        "shift": args.shift,
        "t0": args.t0,
        "k": args.k,
        "sigma": args.sigma,
        "m": args.m,
        "n_y": args.n_y,
        "y_spacing": args.y_spacing,
    }
    config = load_run_config("op", flags, args.config, OP_DEFAULTS, seed=0)
    params = dict(OP_DEFAULTS, **config.params)

    path = _require_input(args.input)
    if args.name in FIELD_INPUT_OPERATORS:
        data = read_field(path, half=args.name == "trace-y0", domain_kind=args.domain)
    elif args.name == "rinv-y0":
        data = _read_function_or_field(path, args.domain)
    else:
        data = read_sampled_function(path, args.domain)

    result = _apply_operator(args.name, params, data)
    if isinstance(result, dict):
        _emit(artifact(dict(result, operator=args.name), config.seed, data.grid.n), args.output)
        return EXIT_PASS
    if not args.output:
        raise UsageError(f"operator '{args.name}' needs --output", operation="op")
    if isinstance(result, SpaceTimeField):
        write_field(args.output, result)
        resolution = result.tgrid.n * int(np.prod(result.xgrid.shape))
    else:
        write_sampled_function(args.output, result)
        resolution = result.grid.n
    log_info(f"op {args.name}: wrote {args.output} ({resolution} samples)")
    return EXIT_PASS


def _verdict_exit(reports) -> int:
    return VERDICT_EXIT[overall_verdict(reports)]


def _report_artifact(reports, seed: int) -> Dict[str, Any]:
    resolution = max((report.resolution for report in reports), default=0)
    payload = {"verdict": overall_verdict(reports), "reports": [report.to_dict() for report in reports]}
    return artifact(payload, seed, resolution)


def _finish_reports(reports, seed: int, out: Optional[str]) -> int:
    data = _report_artifact(reports, seed)
    sys.stdout.write(render_report(data))
    if out:
        write_json(out, data)
    return _verdict_exit(reports)


def cmd_verify(args) -> int:
    if args.suite == "all":
        if args.params:
            raise UsageError("--params cannot be combined with --suite all", operation="verify")
        seed = 0 if args.seed is None else args.seed
        return _finish_reports(run_battery(seed), seed, args.out)

    definition = get_suite(args.suite)
    config = load_run_config("verify", {"seed": args.seed}, args.params, definition.parameters, seed=0)
    report = definition.run(config.seed, **config.params)
    return _finish_reports([report], config.seed, args.out)


def cmd_interp(args) -> int:
    flags = {
        "s1": args.s1,
        "s2": args.s2,
        "theta": args.theta,
        "p": args.p,
        "mu": args.mu,
        "ensemble": args.ensemble,
        "n": args.n,
        "zero_extension": 1 if args.zero_extension else None,
        "seed": args.seed,
    }
    config = load_run_config("interp", flags, args.config, INTERP_DEFAULTS, seed=0)
    params = dict(INTERP_DEFAULTS, **config.params)
    wp = WeightParams(float(params["p"]), float(params["mu"]))
    s1, s2, theta = float(params["s1"]), float(params["s2"]), float(params["theta"])

    source = str(params["ensemble"])
    if os.path.isdir(source):
        ensemble = load_ensemble_dir(source, args.domain)
    else:
        s = (1.0 - theta) * s1 + theta * s2
        ensemble = build_ensemble(source, default_grid(1.0, int(params["n"])), config.seed, wp, s)
    report = run_interp_suite(wp, s1, s2, theta, ensemble, bool(params["zero_extension"]))
    return _finish_reports([report], config.seed, args.report)


def cmd_sweep(args) -> int:
    info = get_registry().get_command_info(args.command)
    if info is None:
        raise UsageError(f"unknown command '{args.command}'", operation="sweep", details={"known": sorted(get_registry().commands)})
    params = read_config_file(args.params)
    unknown = sorted(set(params) - set(info["parameters"]))
    if unknown:
        raise UsageError(
            f"Unknown parameters for '{args.command}': {', '.join(unknown)}",
            operation="sweep",
            details={"unknown": unknown, "allowed": info["parameters"]},
        )
    if "seed" in info["parameters"]:
        params.setdefault("seed", args.seed)

    summary = execute_sweep(args.command, params)
    for entry in summary["operations"]:
        state = "ok" if entry["success"] else "FAILED"
        sys.stdout.write(f"{entry['id']:>4}  {state:<6}  {json.dumps(format_value(entry['params']), sort_keys=True)}\n")
    sys.stdout.write(f"{summary['successCount']} succeeded, {summary['failureCount']} failed\n")
    if args.out:
        write_json(args.out, artifact(summary, args.seed, 0))
    return EXIT_PASS if summary["success"] else EXIT_FAIL


def _error_exit(result: Mapping[str, Any]) -> int:
    code = result.get("code")
    if code == "data_format":
        return EXIT_DATA_FORMAT
    if code in ("usage", "validation", "limit_exponent", "membership", "grid_resolution"):
        return EXIT_USAGE
    return EXIT_FAIL


def cmd_oracle(args) -> int:
    if args.query == "k-brute":
        params = {"coefficients": args.coefficients, "weights0": args.weights0, "weights1": args.weights1, "t": args.t}
    else:
        params = {"kind": args.kind, "param": args.param, "coefficient": args.coefficient, "p": args.p, "mu": args.mu, "T": args.T}
        if args.query == "dense":
            params["levels"] = args.levels
    missing = sorted(key for key, value in params.items() if value is None)
    if missing:
        raise UsageError(f"oracle query '{args.query}' needs {', '.join('--' + key for key in missing)}", operation="oracle")

    result = dispatch_command(ORACLE_QUERIES[args.query], params)
    if not result.get("success", False):
        sys.stderr.write(f"error: {result.get('error')}\n")
        return _error_exit(result)
    payload = {key: value for key, value in result.items() if key != "success"}
    _emit(artifact(dict(payload, query=args.query), 0, 0), args.out)
    return EXIT_PASS


def cmd_report(args) -> int:
    path = _require_input(args.input)
    with open(path, encoding="utf-8") as handle:
        try:
            document = json.load(handle)
        except json.JSONDecodeError as e:
            raise DataFormatError(f"{path}: not valid JSON ({e.msg})", operation="report") from e
    sys.stdout.write(render_report(document))
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(render_report(document, "csv"))
    return EXIT_PASS


# ============================================================================
# Parser
# ============================================================================


def _list_of_floats(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'") from e


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="aniso", description="Weighted anisotropic function spaces at desk scale.")
    parser.add_argument("--version", action="version", version=f"aniso {get_version_string()}")
    parser.add_argument("--verbose", action="store_true", help="log suite verdicts and progress to stderr")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    norm = sub.add_parser("norm", help="norm of sampled data")
    norm.add_argument("--family", choices=FAMILIES)
    norm.add_argument("--s", type=float)
    norm.add_argument("--p", type=float)
    norm.add_argument("--mu", type=float)
    norm.add_argument("--input", required=True)
    norm.add_argument("--grid-n", dest="grid_n", type=int)
    norm.add_argument("--domain", choices=DOMAIN_KINDS, default=FINITE)
    norm.add_argument("--report")
    norm.add_argument("--config")
    norm.set_defaults(handler=cmd_norm)

    op = sub.add_parser("op", help="apply an operator to sampled data")
    op.add_argument("--name", choices=OPERATORS, required=True)
    op.add_argument("--input", required=True)
    op.add_argument("--output")
    op.add_argument("--p", type=float)
    op.add_argument("--mu", type=float)
    op.add_argument("--order", type=float)
    op.add_argument("--shift", type=float)
    op.add_argument("--t0", type=float)
    op.add_argument("--k", type=int)
    op.add_argument("--sigma", type=float)
    op.add_argument("--m", type=int)
    op.add_argument("--n-y", dest="n_y", type=int)
    op.add_argument("--y-spacing", dest="y_spacing", type=float)
    op.add_argument("--domain", choices=DOMAIN_KINDS, default=FINITE)
    op.add_argument("--config")
    op.set_defaults(handler=cmd_op)

    verify = sub.add_parser("verify", help="run a verification suite or the whole battery")
    verify.add_argument("--suite", choices=sorted(SUITES) + ["all"], required=True)
    verify.add_argument("--params")
    verify.add_argument("--seed", type=int)
    verify.add_argument("--out")
    verify.set_defaults(handler=cmd_verify)

    interp = sub.add_parser("interp", help="real interpolation identity check")
    interp.add_argument("--s1", type=float)
    interp.add_argument("--s2", type=float)
    interp.add_argument("--theta", type=float)
    interp.add_argument("--p", type=float)
    interp.add_argument("--mu", type=float)
    interp.add_argument("--ensemble", help="ensemble name or a directory of CSV files")
    interp.add_argument("--n", type=int)
    interp.add_argument("--zero-extension", dest="zero_extension", action="store_true")
    interp.add_argument("--domain", choices=DOMAIN_KINDS, default=FINITE)
    interp.add_argument("--report")
    interp.add_argument("--seed", type=int)
    interp.add_argument("--config")
    interp.set_defaults(handler=cmd_interp)

    sweep = sub.add_parser("sweep", help="run a registered command over a parameter grid")
    sweep.add_argument("--command", required=True)
    sweep.add_argument("--params", required=True)
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--out")
    sweep.set_defaults(handler=cmd_sweep)

    oracle = sub.add_parser("oracle", help="closed-form and brute-force reference values")
    oracle.add_argument("--query", choices=sorted(ORACLE_QUERIES), required=True)
    oracle.add_argument("--kind")
    oracle.add_argument("--param", type=float)
    oracle.add_argument("--coefficient", type=float, default=1.0)
    oracle.add_argument("--p", type=float)
    oracle.add_argument("--mu", type=float)
    oracle.add_argument("--T", type=float, default=1.0)
    oracle.add_argument("--levels", type=int, default=4)
    oracle.add_argument("--coefficients", type=_list_of_floats)
    oracle.add_argument("--weights0", type=_list_of_floats)
    oracle.add_argument("--weights1", type=_list_of_floats)
    oracle.add_argument("--t", type=float)
    oracle.add_argument("--out")
    oracle.set_defaults(handler=cmd_oracle)

    report = sub.add_parser("report", help="render a JSON report as text, optionally as CSV")
    report.add_argument("--input", required=True)
    report.add_argument("--csv")
    report.set_defaults(handler=cmd_report)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        configure_logging(args.verbose)
        return args.handler(args)
    except UsageError as e:
        sys.stderr.write(f"error: {e.message}\n")
        sys.stderr.write(e.details.get("usage", parser.format_usage()))
        return EXIT_USAGE
    except DataFormatError as e:
        sys.stderr.write(f"data format error: {e.message}\n")
        return EXIT_DATA_FORMAT
    except ValidationError as e:
        sys.stderr.write(f"invalid parameters: {e.message}\n")
        return EXIT_USAGE
    except AnisoError as e:
        sys.stderr.write(f"{e.code} error: {e.message}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    raise SystemExit(main())
