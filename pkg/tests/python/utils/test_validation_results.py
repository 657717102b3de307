"""
Unit tests for artifact validation helpers.
"""

import numpy as np

from utils.validation import (
    ValidationResult,
    is_decimal_string,
    validate_close,
    validate_mapping_keys,
    validate_strictly_increasing,
)


class TestValidationResult:
    """Test ValidationResult bookkeeping."""

    def test_errors_flip_success(self):
        """Test adding an error marks the result failed, warnings do not."""
        result = ValidationResult()
        result.add_warning("minor")
        assert result.success is True

        result.add_error("major")
        assert result.to_dict() == {"success": False, "errors": ["major"], "warnings": ["minor"]}

    def test_merge(self):
        """Test merge folds errors and warnings of another result."""
        first = ValidationResult()
        second = ValidationResult()
        second.add_error("e")
        second.add_warning("w")

        merged = first.merge(second)

        assert merged is first
        assert first.success is False
        assert first.errors == ["e"]
        assert first.warnings == ["w"]


class TestValidateClose:
    """Test comparisons against reference values."""

    def test_within_tolerance(self):
        """Test values within rtol pass."""
        assert validate_close("norm", 1.0 + 1e-12, 1.0).success is True

    def test_outside_tolerance(self):
        """Test values outside rtol fail with a message naming the quantity."""
        result = validate_close("norm", 1.1, 1.0, rtol=1e-3)

        assert result.success is False
        assert "norm mismatch" in result.errors[0]

    def test_shape_mismatch_and_non_finite(self):
        """Test shape mismatches and NaN results are errors."""
        assert validate_close("v", np.ones(3), np.ones(2)).errors[0].startswith("v: shape mismatch")
        assert validate_close("v", np.nan, 1.0).errors == ["v: non-finite computed value"]


class TestValidateSequences:
    """Test node and mapping checks."""

    def test_strictly_increasing(self):
        """Test positive increasing nodes pass and others fail."""
        assert validate_strictly_increasing("nodes", [0.1, 0.2, 0.5]).success is True
        assert validate_strictly_increasing("nodes", [0.0, 0.2]).success is False
        assert validate_strictly_increasing("nodes", [0.1, 0.1]).success is False
        assert validate_strictly_increasing("nodes", []).success is False

    def test_mapping_keys(self):
        """Test missing keys are errors and unexpected keys are warnings."""
        result = validate_mapping_keys("report", {"suite": "x", "extra": 1}, ["suite", "verdict"])

        assert result.errors == ["report missing key 'verdict'"]
        assert result.warnings == ["report has unexpected key 'extra'"]
        assert validate_mapping_keys("report", [], ["suite"]).success is False

    def test_is_decimal_string(self):
        """Test decimal strings, including inf and nan, are recognised."""
        assert is_decimal_string("0.5") is True
        assert is_decimal_string("-inf") is True
        assert is_decimal_string("nan") is True
        assert is_decimal_string("half") is False
        assert is_decimal_string(0.5) is False
