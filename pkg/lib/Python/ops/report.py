"""
aniso Reports - VerificationReport, the verdict rule, and text/CSV rendering
"""

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Union

import numpy as np

from utils.error_handling import DataFormatError
from utils.general import format_decimal, parse_decimal
from utils.validation import ValidationResult, is_decimal_string, validate_mapping_keys

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"
VERDICTS = (PASS, FAIL, INCONCLUSIVE)

DRIFT_TOL = 0.10

REPORT_KEYS = ("suite", "verdict", "worst_ratio", "refinement_drift", "threshold", "drift_tol", "instances")
OPTIONAL_REPORT_KEYS = ("lower", "hard_failures", "notes", "witness", "informational")
INSTANCE_KEYS = ("params", "lhs", "rhs", "ratio", "resolution")
TABLE_COLUMNS = ("params", "lhs", "rhs", "ratio", "drift")


def format_value(value: Any) -> Any:
    """Artifact encoding: reals become decimal strings, containers are walked."""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return format_decimal(value)
    if isinstance(value, np.ndarray):
        return [format_value(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [format_value(v) for v in value]
    if isinstance(value, Mapping):
        return {str(k): format_value(v) for k, v in sorted(value.items())}
    return value


# ============================================================================
# Report types
# ============================================================================


@dataclass
class Instance:
    """One measured inequality: lhs <= ratio * rhs."""

    params: Dict[str, Any]
    lhs: float
    rhs: float
    ratio: float
    resolution: int
    drift: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "params": format_value(self.params),
            "lhs": format_decimal(self.lhs),
            "rhs": format_decimal(self.rhs),
            "ratio": format_decimal(self.ratio),
            "resolution": int(self.resolution),
            "drift": format_decimal(self.drift),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Instance":
        check = validate_mapping_keys("instance", data, INSTANCE_KEYS, ("drift",))
        if not check.success:
            raise DataFormatError("; ".join(check.errors), operation="Instance.from_dict")
        return cls(
            params=dict(data["params"]),
            lhs=_decimal(data["lhs"], "lhs"),
            rhs=_decimal(data["rhs"], "rhs"),
            ratio=_decimal(data["ratio"], "ratio"),
            resolution=int(data["resolution"]),
            drift=_decimal(data.get("drift", "0"), "drift"),
        )


def ratio_of(lhs: float, rhs: float) -> float:
    """lhs / rhs with 0/0 = 0 (the zero function satisfies every inequality)."""
    if rhs == 0.0:
        return 0.0 if lhs == 0.0 else math.inf
    return lhs / rhs


@dataclass
class VerificationReport:
    suite: str
    instances: List[Instance]
    worst_ratio: float
    refinement_drift: float
    verdict: str
    threshold: float
    drift_tol: float = DRIFT_TOL
    lower: Optional[float] = None
    hard_failures: List[str] = field(default_factory=list)
    notes: Dict[str, Any] = field(default_factory=dict)
    witness: bool = False
    informational: bool = False

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    @property
    def best_ratio(self) -> float:
        return min((inst.ratio for inst in self.instances), default=0.0)

    @property
    def resolution(self) -> int:
        return max((inst.resolution for inst in self.instances), default=0)

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "suite": self.suite,
            "verdict": self.verdict,
            "worst_ratio": format_decimal(self.worst_ratio),
            "refinement_drift": format_decimal(self.refinement_drift),
            "threshold": format_decimal(self.threshold),
            "drift_tol": format_decimal(self.drift_tol),
            "instances": [inst.to_dict() for inst in self.instances],
            "hard_failures": list(self.hard_failures),
            "notes": format_value(self.notes),
            "witness": self.witness,
            "informational": self.informational,
        }
        if self.lower is not None:
            data["lower"] = format_decimal(self.lower)
        return data

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "VerificationReport":
        """Rebuild a report from its JSON form.

        Raises:
            DataFormatError: missing keys, unknown verdict or non-decimal reals
        """
        check = validate_report_dict(data)
        if not check.success:
            raise DataFormatError("; ".join(check.errors), operation="VerificationReport.from_dict")
        return cls(
            suite=str(data["suite"]),
            instances=[Instance.from_dict(item) for item in data["instances"]],
            worst_ratio=_decimal(data["worst_ratio"], "worst_ratio"),
            refinement_drift=_decimal(data["refinement_drift"], "refinement_drift"),
            verdict=data["verdict"],
            threshold=_decimal(data["threshold"], "threshold"),
            drift_tol=_decimal(data["drift_tol"], "drift_tol"),
            lower=_decimal(data["lower"], "lower") if "lower" in data else None,
            hard_failures=list(data.get("hard_failures", [])),
            notes=dict(data.get("notes", {})),
            witness=bool(data.get("witness", False)),
            informational=bool(data.get("informational", False)),
        )


def _decimal(text: Any, name: str) -> float:
    if not is_decimal_string(text):
        raise DataFormatError(f"{name} must be a decimal string, got {text!r}", operation="report")
    return parse_decimal(text)


def validate_report_dict(data: Any) -> ValidationResult:
    result = validate_mapping_keys("report", data, REPORT_KEYS, OPTIONAL_REPORT_KEYS)
    if not result.success:
        return result
    if data["verdict"] not in VERDICTS:
        result.add_error(f"unknown verdict '{data['verdict']}'")
    for key in ("worst_ratio", "refinement_drift", "threshold", "drift_tol"):
        if not is_decimal_string(data[key]):
            result.add_error(f"{key} must be a decimal string")
    if not isinstance(data["instances"], list):
        result.add_error("instances must be a list")
    return result


# ============================================================================
# Verdicts
# ============================================================================


def decide_verdict(
    worst_ratio: float,
    threshold: float,
    drift: float,
    drift_tol: float = DRIFT_TOL,
    hard_failures: Sequence[str] = (),
    witness: bool = False,
    best_ratio: Optional[float] = None,
    lower: Optional[float] = None,
) -> str:
    """fail on a violated bound or hard identity; inconclusive on drift or in witness mode."""
    if hard_failures or not worst_ratio <= threshold:
        return FAIL
    if lower is not None and best_ratio is not None and best_ratio < lower:
        return FAIL
    if witness or not drift <= drift_tol:
        return INCONCLUSIVE
    return PASS


def build_report(
    suite: str,
    instances: Iterable[Instance],
    threshold: float,
    *,
    drift_tol: float = DRIFT_TOL,
    lower: Optional[float] = None,
    hard_failures: Sequence[str] = (),
    witness: bool = False,
    informational: bool = False,
    notes: Optional[Dict[str, Any]] = None,
) -> VerificationReport:
    """Reduce instances to a report: worst ratio, worst drift and the verdict."""
    instances = list(instances)
    worst = max((inst.ratio for inst in instances), default=0.0)
    best = min((inst.ratio for inst in instances), default=None)
    drift = max((inst.drift for inst in instances), default=0.0)
    verdict = decide_verdict(worst, threshold, drift, drift_tol, hard_failures, witness, best, lower)
    return VerificationReport(
        suite=suite,
        instances=instances,
        worst_ratio=worst,
        refinement_drift=drift,
        verdict=verdict,
        threshold=threshold,
        drift_tol=drift_tol,
        lower=lower,
        hard_failures=list(hard_failures),
        notes=dict(notes or {}),
        witness=witness,
        informational=informational,
    )


# ============================================================================
# Rendering
# ============================================================================


def _params_cell(params: Mapping[str, Any]) -> str:
    return ";".join(f"{k}={v}" for k, v in sorted(params.items()))


def _rows(report: Mapping[str, Any]) -> List[List[str]]:
    rows = []
    for inst in report["instances"]:
        rows.append(
            [
                _params_cell(inst["params"]),
                inst["lhs"],
                inst["rhs"],
                inst["ratio"],
                inst.get("drift", "0"),
            ]
        )
    return rows


def summary_line(report: Mapping[str, Any]) -> str:
    return f"{report['verdict'].upper()} worst_ratio={report['worst_ratio']} drift={report['refinement_drift']}"


def _report_dicts(document: Union[Mapping[str, Any], VerificationReport]) -> List[Mapping[str, Any]]:
    if isinstance(document, VerificationReport):
        return [document.to_dict()]
    if not isinstance(document, Mapping):
        raise DataFormatError("report document must be an object", operation="render_report")
    reports = document["reports"] if "reports" in document else [document]
    if not isinstance(reports, list):
        raise DataFormatError("reports must be a list", operation="render_report")
    for report in reports:
        check = validate_report_dict(report)
        if not check.success:
            raise DataFormatError("; ".join(check.errors), operation="render_report")
    return reports


def render_report(document: Union[Mapping[str, Any], VerificationReport], fmt: str = "text") -> str:
    """Render one report, or an artifact holding several, as a text or CSV table.

    Args:
        document: VerificationReport, its dict, or an artifact {"reports": [...]}
        fmt: "text" (aligned columns plus a summary line per suite) or "csv"

    Raises:
        DataFormatError: schema mismatch
    """
    reports = _report_dicts(document)
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(("suite",) + TABLE_COLUMNS)
        for report in reports:
            for row in _rows(report):
                writer.writerow([report["suite"]] + row)
        return buffer.getvalue()
    if fmt != "text":
        raise DataFormatError(f"unknown report format '{fmt}'", operation="render_report")

    blocks = []
    for report in reports:
        rows = [list(TABLE_COLUMNS)] + _rows(report)
        widths = [max(len(row[i]) for row in rows) for i in range(len(TABLE_COLUMNS))]
        lines = [f"suite: {report['suite']}"]
        for row in rows:
            lines.append("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())
        for failure in report.get("hard_failures", []):
            lines.append(f"hard failure: {failure}")
        lines.append(summary_line(report))
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"
