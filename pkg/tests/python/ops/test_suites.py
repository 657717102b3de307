"""
Tests for the suite registry, the battery verdict and parameter sweeps.
"""

import pytest

from ops.report import FAIL, INCONCLUSIVE, PASS, build_report
from ops.suites import (
    SUITES,
    SweepManager,
    embeds_command,
    expand_grid,
    get_suite,
    list_suites,
    overall_verdict,
    resolve_sweep_target,
    run_suite,
    trace_order_command,
    verify_commands,
)
from utils.error_handling import UsageError, ValidationError


def _report(verdict, informational=False):
    report = build_report("x", [], 1.0, informational=informational)
    report.verdict = verdict
    return report


class TestRegistry:
    """Test suite lookup and parameter resolution."""

    def test_list_suites_sorted(self):
        """Test every suite is listed once, by name."""
        names = [entry["suite"] for entry in list_suites()]

        assert names == sorted(SUITES)
        assert "hardy" in names and "t-sweep" in names

    def test_unknown_suite(self):
        """Test unknown names are usage errors."""
        with pytest.raises(UsageError):
            get_suite("nonsense")

    def test_resolve_overrides(self):
        """Test overrides replace defaults and None keeps them."""
        resolved = get_suite("hardy").resolve({"n": 64, "size": None})

        assert resolved["n"] == 64
        assert resolved["size"] == 32

    def test_resolve_list_values(self):
        """Test scalar values for *_values keys are wrapped in a list."""
        assert get_suite("poincare").resolve({"T_values": 2.0})["T_values"] == [2.0]

    def test_resolve_unknown_key(self):
        """Test unknown parameters are reported with the allowed ones."""
        with pytest.raises(UsageError) as excinfo:
            get_suite("phi").resolve({"bogus": 1})

        assert excinfo.value.details["unknown"] == ["bogus"]
        assert excinfo.value.details["allowed"] == ["n", "size"]

    def test_run_phi(self):
        """Test a small phi run passes."""
        report = run_suite("phi", 0, {"n": 64, "size": 4})

        assert report.verdict == PASS
        assert report.suite == "phi"

    def test_extension_orders(self):
        """Test the extension suite and the T-sweep cover s = 0, 1/2, 1, 3/2, 2 by default."""
        orders = [0.0, 0.5, 1.0, 1.5, 2.0]

        assert get_suite("extension").defaults["s_values"] == orders
        assert get_suite("t-sweep").defaults["s_values"] == orders

    def test_witness_is_informational(self):
        """Test the witness suite is flagged informational."""
        assert get_suite("witness").informational
        assert not get_suite("hardy").informational


class TestSweepTargets:
    """Test T-sweep target resolution."""

    def test_direct_target(self):
        """Test ratio targets resolve to themselves."""
        assert resolve_sweep_target("identity") == "identity"

    def test_suite_with_zero_variant(self):
        """Test the extension suite sweeps its vanishing-trace extension."""
        assert resolve_sweep_target("extension") == "extend-zero"

    def test_suite_without_zero_variant(self):
        """Test suites without a vanishing-trace variant are rejected."""
        with pytest.raises(ValidationError):
            resolve_sweep_target("hardy")


class TestBattery:
    """Test the overall verdict."""

    @pytest.mark.parametrize(
        "verdicts, expected",
        [
            ([PASS, PASS], PASS),
            ([PASS, INCONCLUSIVE], INCONCLUSIVE),
            ([INCONCLUSIVE, FAIL], FAIL),
            ([], PASS),
        ],
    )
    def test_overall_verdict(self, verdicts, expected):
        """Test fail beats inconclusive beats pass."""
        assert overall_verdict([_report(v) for v in verdicts]) == expected

    def test_informational_reports_do_not_bind(self):
        """Test informational failures leave the verdict alone."""
        assert overall_verdict([_report(PASS), _report(FAIL, informational=True)]) == PASS


class TestCommands:
    """Test the predicate and verify command handlers."""

    def test_embeds_command(self):
        """Test the predicate handler wraps its answer."""
        result = embeds_command(p=2, q=4, mu=1, s=0.8, tau=0.5)

        assert result["success"] is True
        assert result["embeds"] is True

    def test_embeds_command_invalid(self):
        """Test invalid queries come back as validation errors."""
        result = embeds_command(p=4, q=2, mu=1, s=0.8, tau=0.5)

        assert result["success"] is False
        assert result["code"] == "validation"

    def test_trace_order_command(self):
        """Test spatial orders come back as a pair."""
        result = trace_order_command(variant="spatial", p=2, mu=1, s=0.5)

        assert result["order"] == pytest.approx([0.25, 0.5])

    def test_verify_commands(self):
        """Test one command per suite, each taking a seed."""
        commands = verify_commands()

        assert set(commands) == {f"verify_{name.replace('-', '_')}" for name in SUITES}
        handler, params = commands["verify_phi"]
        assert params == ["seed", "n", "size"]
        result = handler(seed=0, n=64, size=4)
        assert result["verdict"] == PASS
        assert result["report"]["suite"] == "phi"

    def test_verify_command_usage_error(self):
        """Test unknown parameters surface as a usage error result."""
        handler, _ = verify_commands()["verify_phi"]

        result = handler(bogus=1)

        assert result["success"] is False
        assert result["code"] == "usage"


class TestSweeps:
    """Test grid expansion and batch execution."""

    def test_expand_grid_order(self):
        """Test the product runs over sorted keys with the last key fastest."""
        points = expand_grid({"s": [0.8, 0.6], "p": [2, 3], "tau": 0.5})

        assert points == [
            {"p": 2, "s": 0.8, "tau": 0.5},
            {"p": 2, "s": 0.6, "tau": 0.5},
            {"p": 3, "s": 0.8, "tau": 0.5},
            {"p": 3, "s": 0.6, "tau": 0.5},
        ]

    def test_expand_grid_keeps_value_lists(self):
        """Test *_values keys are not expanded."""
        assert expand_grid({"T_values": [1.0, 2.0], "n": 64}) == [{"T_values": [1.0, 2.0], "n": 64}]

    def test_expand_grid_empty_axis(self):
        """Test empty sweep axes are rejected."""
        with pytest.raises(ValidationError):
            expand_grid({"s": []})

    def test_execute_sweep(self):
        """Test results are collected in grid order and failed verdicts count as failures."""
        calls = []

        def dispatch(name, params):
            calls.append((name, params))
            if params["s"] == 0.6:
                return {"success": True, "verdict": FAIL}
            return {"success": True, "verdict": PASS}

        manager = SweepManager(dispatch)
        summary = manager.execute_sweep("verify_x", {"s": [0.8, 0.6]})

        assert [params["s"] for _, params in calls] == [0.8, 0.6]
        assert summary["successCount"] == 1
        assert summary["failureCount"] == 1
        assert summary["success"] is False
        assert summary["command"] == "verify_x"
        assert manager.history == [{"count": 2, "successCount": 1, "failureCount": 1}]

    def test_execute_batch_errors(self):
        """Test missing names, bad params and failed dispatches."""
        manager = SweepManager(lambda name, params: {"success": False, "error": "boom"})

        summary = manager.execute_batch([{"id": "a"}, {"operation": "x", "params": []}, {"operation": "x"}])

        errors = [entry["error"] for entry in summary["operations"]]
        assert errors == ["Operation name is required", "params must be a dict", "boom"]
        assert summary["failureCount"] == 3
