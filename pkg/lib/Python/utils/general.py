"""
aniso Utilities - logging helpers and number formatting shared by all modules
"""

import logging
import math
import os
import sys

LOGGER_NAME = "aniso"
LOG_PREFIX = "ANISO: "

# Artifacts carry reals as decimal strings with this many significant digits
SIGNIFICANT_DIGITS = 15

_logger = logging.getLogger(LOGGER_NAME)
_handler_installed = False


def configure_logging(verbose=False):
    """Install a stderr handler on the aniso logger (idempotent).

    Args:
        verbose: Emit info-level messages when True, warnings and above otherwise
    """
    global _handler_installed
    if not _handler_installed:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(levelname)s %(message)s"))
        _logger.addHandler(handler)
        _handler_installed = True
    if os.environ.get("ANISO_DEBUG"):
        _logger.setLevel(logging.DEBUG)
    else:
        _logger.setLevel(logging.INFO if verbose else logging.WARNING)


def log_debug(message):
    """Log a debug message if debug mode is enabled."""
    if os.environ.get("ANISO_DEBUG"):
        _logger.debug(f"{LOG_PREFIX}{message}")


def log_info(message):
    """Log an informational message."""
    _logger.info(f"{LOG_PREFIX}{message}")


def log_warning(message):
    """Log a warning message."""
    _logger.warning(f"{LOG_PREFIX}{message}")


def log_error(message):
    """Log an error message."""
    _logger.error(f"{LOG_PREFIX}{message}")


def format_decimal(value):
    """Format a real as a locale-independent decimal string.

    Non-finite values are written as "inf", "-inf" or "nan" so that reports
    stay parseable.

    Args:
        value: Number to format

    Returns:
        str: Decimal representation with SIGNIFICANT_DIGITS significant digits
    """
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if value == 0.0:
        return "0"
    return f"{value:.{SIGNIFICANT_DIGITS}g}"


def parse_decimal(text):
    """Inverse of format_decimal."""
    return float(text)


def safe_str(obj):
    """Safely convert an object to string, handling None.

    Args:
        obj: Object to convert to string

    Returns:
        str: String representation or empty string if None
    """
    if obj is None:
        return ""
    return str(obj)
