"""
Unit tests for number formatting and logging helpers.
"""

import logging

import pytest

from utils.general import LOGGER_NAME, configure_logging, format_decimal, log_debug, parse_decimal, safe_str


class TestFormatDecimal:
    """Test the decimal string form used in every artifact."""

    @pytest.mark.parametrize(
        "value,expected",
        [
            (1.0, "1"),
            (0.5, "0.5"),
            (0.01, "0.01"),
            (0.0, "0"),
            (-0.0, "0"),
            (float("inf"), "inf"),
            (float("-inf"), "-inf"),
            (float("nan"), "nan"),
            (1.0 / 3.0, "0.333333333333333"),
        ],
    )
    def test_formatting(self, value, expected):
        """Test representative values."""
        assert format_decimal(value) == expected

    def test_parse_inverts_to_fifteen_digits(self):
        """Test parse_decimal recovers the value to the printed precision."""
        value = 2.0**0.5
        assert parse_decimal(format_decimal(value)) == pytest.approx(value, rel=1e-14)


class TestLogging:
    """Test logger configuration."""

    def test_verbose_sets_info(self, monkeypatch):
        """Test verbose switches the aniso logger to INFO."""
        monkeypatch.delenv("ANISO_DEBUG", raising=False)
        configure_logging(verbose=True)
        assert logging.getLogger(LOGGER_NAME).level == logging.INFO

        configure_logging(verbose=False)
        assert logging.getLogger(LOGGER_NAME).level == logging.WARNING

    def test_debug_env(self, monkeypatch, caplog):
        """Test ANISO_DEBUG enables debug messages with the log prefix."""
        monkeypatch.setenv("ANISO_DEBUG", "1")
        configure_logging()

        with caplog.at_level(logging.DEBUG, logger=LOGGER_NAME):
            log_debug("grid built")

        assert "ANISO: grid built" in caplog.text

    def test_safe_str(self):
        """Test None becomes an empty string."""
        assert safe_str(None) == ""
        assert safe_str(3) == "3"
