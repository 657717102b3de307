"""
aniso Error Handling Framework

Provides decorators, validators, and error types so numerical code can raise
specific errors instead of carrying try/except boilerplate.
"""

import functools
import inspect
import math
from typing import Any, Dict, List, Optional

import numpy as np

from utils.general import log_error

# ============================================================================
# Custom Exception Types
# ============================================================================


class AnisoError(Exception):
    """Base exception for all aniso operations."""

    code = "error"

    def __init__(self, message: str, operation: str = None, details: Dict = None):
        self.message = message
        self.operation = operation or "unknown"
        self.details = details or {}
        super().__init__(self.message)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to standardized error response format."""
        return {
            "success": False,
            "error": self.message,
            "code": self.code,
            "operation": self.operation,
            "details": self.details,
        }


class ValidationError(AnisoError):
    """Raised when input validation fails."""

    code = "validation"


class ProcessingError(AnisoError):
    """Raised when a computation fails during execution."""

    code = "processing"


class LimitExponentError(ValidationError):
    """Raised for the excluded limit cases s = k + 1 - mu + 1/p."""

    code = "limit_exponent"


class MembershipError(ValidationError):
    """Raised when a function is outside the requested vanishing-trace space."""

    code = "membership"


class GridResolutionError(ValidationError):
    """Raised when a grid is too coarse for the requested operation."""

    code = "grid_resolution"


class BranchCutError(ProcessingError):
    """Raised when a fractional power would be evaluated on its branch cut."""

    code = "branch_cut"


class ConvergenceError(ProcessingError):
    """Raised when a refinement ladder or optimizer fails to converge."""

    code = "convergence"


class DataFormatError(AnisoError):
    """Raised for malformed CSV, config or report data."""

    code = "data_format"


class UsageError(AnisoError):
    """Raised for command-line misuse."""

    code = "usage"


# ============================================================================
# Input Validation Framework
# ============================================================================


class ValidationRule:
    """Base class for validation rules."""

    def validate(self, value: Any, field_name: str) -> Optional[str]:
        """Validate a value. Returns error message if invalid, None if valid."""
        raise NotImplementedError


class NumericRangeRule(ValidationRule):
    """Validates that a numeric value is finite and within a range.

    Args:
        min_val: Lower bound (None for unbounded)
        max_val: Upper bound (None for unbounded)
        exclusive: Treat both bounds as strict
    """

    def __init__(self, min_val: float = None, max_val: float = None, exclusive: bool = False):
        self.min_val = min_val
        self.max_val = max_val
        self.exclusive = exclusive

    def validate(self, value: Any, field_name: str) -> Optional[str]:
        if isinstance(value, bool) or not isinstance(value, (int, float, np.integer, np.floating)):
            return f"{field_name} must be numeric"
        if not math.isfinite(value):
            return f"{field_name} must be finite"
        if self.exclusive:
            if self.min_val is not None and value <= self.min_val:
                return f"{field_name} must be > {self.min_val}"
            if self.max_val is not None and value >= self.max_val:
                return f"{field_name} must be < {self.max_val}"
            return None
        if self.min_val is not None and value < self.min_val:
            return f"{field_name} must be >= {self.min_val}"
        if self.max_val is not None and value > self.max_val:
            return f"{field_name} must be <= {self.max_val}"
        return None


class IntegerRule(ValidationRule):
    """Validates that a value is an integer (bools rejected)."""

    def __init__(self, min_val: int = None, max_val: int = None):
        self.min_val = min_val
        self.max_val = max_val

    def validate(self, value: Any, field_name: str) -> Optional[str]:
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
            return f"{field_name} must be an integer"
        if self.min_val is not None and value < self.min_val:
            return f"{field_name} must be >= {self.min_val}"
        if self.max_val is not None and value > self.max_val:
            return f"{field_name} must be <= {self.max_val}"
        return None


def validate_inputs(validation_schema: Dict[str, List[ValidationRule]]):
    """
    Decorator that validates function inputs against a schema.

    Args:
        validation_schema: Dict mapping parameter names to list of validation rules

    Example:
        @validate_inputs({
            'theta': [NumericRangeRule(0.0, 1.0, exclusive=True)],
            'levels': [IntegerRule(min_val=3)],
        })
        def dense_quadrature(integrand, T, levels=4):
            # inputs are already validated
    """

    def decorator(func):
        sig = inspect.signature(func)

        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            bound_args = sig.bind(*args, **kwargs)
            bound_args.apply_defaults()

            for param_name, rules in validation_schema.items():
                if param_name in bound_args.arguments:
                    value = bound_args.arguments[param_name]
                    for rule in rules:
                        error_msg = rule.validate(value, param_name)
                        if error_msg:
                            raise ValidationError(
                                error_msg,
                                operation=func.__name__,
                                details={"parameter": param_name, "value": str(value)},
                            )

            return func(*args, **kwargs)

        return wrapper

    return decorator


def require(condition: bool, message: str, operation: str, error_type: type = ValidationError, **details):
    """Raise error_type(message) unless condition holds."""
    if not condition:
        raise error_type(message, operation=operation, details=details)


# ============================================================================
# Error Handling Decorators
# ============================================================================


def handle_numeric_errors(operation_name: str = None):
    """
    Decorator that converts raw numerical failures to ProcessingError.

    Layered decorator stack (outermost first):
        @validate_inputs        validates params, raises ValidationError before execution
        @handle_numeric_errors  converts FloatingPointError/LinAlgError/ZeroDivisionError
        @safe_operation         catches AnisoError/Exception, returns error dict

    AnisoError subclasses pass through unchanged.

    Args:
        operation_name: Name of the operation for error context
    """

    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            op_name = operation_name or func.__name__

            try:
                return func(*args, **kwargs)

            except AnisoError:
                raise

            except (FloatingPointError, ZeroDivisionError, np.linalg.LinAlgError) as e:
                raise ProcessingError(
                    f"Numerical failure: {str(e)}",
                    operation=op_name,
                    details={"error_type": type(e).__name__},
                ) from e

        return wrapper

    return decorator


def safe_operation(operation_type: str = "operation"):
    """
    Decorator that provides safe execution with standardized error handling.

    Args:
        operation_type: Type of operation (norm, op, verify, oracle, ...)
    """

    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            try:
                result = func(*args, **kwargs)

                if not isinstance(result, dict):
                    return {"success": True, "result": result}
                if "success" not in result:
                    result["success"] = True

                return result

            except AnisoError as e:
                log_error(f"{operation_type} operation failed: {e.message}")
                return e.to_dict()

            except Exception as e:
                # Last resort for truly unexpected errors
                log_error(f"Unexpected error in {operation_type} operation: {str(e)}")
                return {
                    "success": False,
                    "error": f"Unexpected {operation_type} error: {str(e)}",
                    "code": "unexpected",
                    "operation": func.__name__,
                    "details": {"error_type": type(e).__name__},
                }

        return wrapper

    return decorator
