"""
aniso Validation Framework - checks that computed artifacts are well formed
"""

import math

import numpy as np


class ValidationResult:
    """Result of a validation check"""

    def __init__(self, success=True, errors=None, warnings=None):
        self.success = success
        self.errors = errors or []
        self.warnings = warnings or []

    def add_error(self, error):
        self.success = False
        self.errors.append(error)

    def add_warning(self, warning):
        self.warnings.append(warning)

    def merge(self, other):
        """Fold another result into this one."""
        for error in other.errors:
            self.add_error(error)
        for warning in other.warnings:
            self.add_warning(warning)
        return self

    def to_dict(self):
        return {"success": self.success, "errors": self.errors, "warnings": self.warnings}


def validate_close(name, actual, expected, rtol=1e-10, atol=0.0):
    """Validate that a computed value matches a reference value.

    Args:
        name: Label used in messages
        actual: Computed value (scalar or array)
        expected: Reference value
        rtol: Relative tolerance
        atol: Absolute tolerance

    Returns:
        ValidationResult
    """
    result = ValidationResult()
    actual = np.asarray(actual, dtype=float)
    expected = np.asarray(expected, dtype=float)
    if actual.shape != expected.shape:
        result.add_error(f"{name}: shape mismatch {actual.shape} vs {expected.shape}")
        return result
    if not np.all(np.isfinite(actual)):
        result.add_error(f"{name}: non-finite computed value")
        return result
    diff = np.max(np.abs(actual - expected)) if actual.size else 0.0
    scale = np.max(np.abs(expected)) if expected.size else 0.0
    if diff > atol + rtol * scale:
        result.add_error(f"{name} mismatch: expected {scale:.6g}-scale value, diff {diff:.3e} (rtol {rtol:g})")
    return result


def validate_strictly_increasing(name, values):
    """Validate a 1-D array is finite, positive and strictly increasing."""
    result = ValidationResult()
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size == 0:
        result.add_error(f"{name} must be a non-empty 1-D array")
        return result
    if not np.all(np.isfinite(values)):
        result.add_error(f"{name} contains non-finite entries")
    if values[0] <= 0.0:
        result.add_error(f"{name} must be positive, first entry {values[0]!r}")
    if np.any(np.diff(values) <= 0.0):
        result.add_error(f"{name} must be strictly increasing")
    return result


def validate_mapping_keys(name, mapping, required, optional=()):
    """Validate that a mapping has the required keys and nothing unexpected."""
    result = ValidationResult()
    if not isinstance(mapping, dict):
        result.add_error(f"{name} must be an object")
        return result
    for key in required:
        if key not in mapping:
            result.add_error(f"{name} missing key '{key}'")
    allowed = set(required) | set(optional)
    for key in mapping:
        if key not in allowed:
            result.add_warning(f"{name} has unexpected key '{key}'")
    return result


def is_decimal_string(text):
    """True when text parses as a float (reports store reals as strings)."""
    if not isinstance(text, str):
        return False
    try:
        value = float(text)
    except ValueError:
        return False
    return not math.isnan(value) or text == "nan"
