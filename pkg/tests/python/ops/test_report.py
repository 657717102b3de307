"""
Tests for verification reports: the verdict rule, the JSON form and rendering.
"""

import math

import pytest

from fixtures.report_documents import FAILED_REPORT, FAILED_REPORT_TEXT, HARDY_REPORT, HARDY_REPORT_CSV, HARDY_REPORT_TEXT
from ops.report import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    Instance,
    VerificationReport,
    build_report,
    decide_verdict,
    format_value,
    ratio_of,
    render_report,
)
from utils.error_handling import DataFormatError


def _hardy_report():
    instance = Instance({"member": "ramp", "s": 1.0}, 0.5, 1.0, 0.5, 256, 0.01)
    return build_report("hardy", [instance], 1.02)


class TestVerdicts:
    """Test the verdict rule."""

    @pytest.mark.parametrize(
        "kwargs, expected",
        [
            ({"worst_ratio": 0.9, "threshold": 1.0, "drift": 0.01}, PASS),
            ({"worst_ratio": 1.1, "threshold": 1.0, "drift": 0.01}, FAIL),
            ({"worst_ratio": 0.9, "threshold": 1.0, "drift": 0.5}, INCONCLUSIVE),
            ({"worst_ratio": 0.9, "threshold": 1.0, "drift": 0.0, "hard_failures": ["x"]}, FAIL),
            ({"worst_ratio": 0.9, "threshold": 1.0, "drift": 0.0, "witness": True}, INCONCLUSIVE),
            ({"worst_ratio": 1.0, "threshold": 1.01, "drift": 0.0, "best_ratio": 0.5, "lower": 0.99}, FAIL),
            ({"worst_ratio": math.nan, "threshold": 1.0, "drift": 0.0}, FAIL),
            ({"worst_ratio": 0.5, "threshold": 1.0, "drift": math.nan}, INCONCLUSIVE),
        ],
    )
    def test_decide_verdict(self, kwargs, expected):
        """Test each branch of the rule."""
        assert decide_verdict(**kwargs) == expected

    def test_ratio_of(self):
        """Test the zero conventions."""
        assert ratio_of(0.0, 0.0) == 0.0
        assert ratio_of(1.0, 0.0) == math.inf
        assert ratio_of(1.0, 4.0) == 0.25

    def test_build_report_reduces(self):
        """Test worst ratio, drift and verdict come from the instances."""
        instances = [
            Instance({"member": "a"}, 1.0, 2.0, 0.5, 64, 0.02),
            Instance({"member": "b"}, 3.0, 4.0, 0.75, 64, 0.05),
        ]

        report = build_report("phi", instances, 1.0)

        assert report.worst_ratio == 0.75
        assert report.best_ratio == 0.5
        assert report.refinement_drift == 0.05
        assert report.resolution == 64
        assert report.passed

    def test_empty_report(self):
        """Test a report without instances passes with worst ratio 0."""
        report = build_report("empty", [], 1.0)

        assert report.worst_ratio == 0.0
        assert report.verdict == PASS


class TestReportDocuments:
    """Test the decimal-string JSON form."""

    def test_to_dict(self):
        """Test reals are written as shortest decimal strings."""
        assert _hardy_report().to_dict() == HARDY_REPORT

    def test_from_dict(self, report_document):
        """Test a stored document is rebuilt with float fields."""
        report = VerificationReport.from_dict(report_document)

        assert report.worst_ratio == 0.5
        assert report.threshold == 1.02
        assert report.instances[0].resolution == 256
        assert report.lower is None

    def test_from_dict_with_lower(self):
        """Test the lower bound is read when present."""
        assert VerificationReport.from_dict(FAILED_REPORT).lower == 0.99

    def test_bad_verdict(self, report_document):
        """Test unknown verdicts are rejected."""
        report_document["verdict"] = "maybe"

        with pytest.raises(DataFormatError):
            VerificationReport.from_dict(report_document)

    def test_non_decimal_ratio(self, report_document):
        """Test reals must be decimal strings."""
        report_document["instances"][0]["ratio"] = 0.5

        with pytest.raises(DataFormatError):
            VerificationReport.from_dict(report_document)

    def test_format_value(self):
        """Test containers are walked and keys sorted."""
        assert format_value({"b": 0.5, "a": [1.0, 2]}) == {"a": ["1", 2], "b": "0.5"}
        assert format_value(True) is True


class TestRendering:
    """Test text and CSV rendering."""

    def test_text(self, report_document):
        """Test the aligned text table."""
        assert render_report(report_document) == HARDY_REPORT_TEXT

    def test_text_from_report_object(self):
        """Test a VerificationReport renders like its document."""
        assert render_report(_hardy_report()) == HARDY_REPORT_TEXT

    def test_hard_failures_listed(self):
        """Test hard failures come before the summary line."""
        assert render_report(FAILED_REPORT) == FAILED_REPORT_TEXT

    def test_csv(self, report_document):
        """Test the CSV table."""
        assert render_report(report_document, fmt="csv") == HARDY_REPORT_CSV

    def test_artifact_with_several_reports(self, report_document):
        """Test artifacts render one block per report."""
        text = render_report({"reports": [report_document, FAILED_REPORT]})

        assert text == HARDY_REPORT_TEXT + "\n" + FAILED_REPORT_TEXT

    def test_unknown_format(self, report_document):
        """Test unknown formats are rejected."""
        with pytest.raises(DataFormatError):
            render_report(report_document, fmt="html")

    def test_schema_mismatch(self):
        """Test documents missing required keys are rejected."""
        with pytest.raises(DataFormatError):
            render_report({"suite": "hardy"})
