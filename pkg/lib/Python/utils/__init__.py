"""
aniso Utilities Package - Common utilities and helpers
"""

# Import commonly used functions for convenience
from .general import (
    configure_logging,
    format_decimal,
    log_debug,
    log_error,
    log_info,
    log_warning,
    parse_decimal,
    safe_str,
)
from .cache import cached, content_hash, get_oracle_cache
from .config import RunConfig, load_run_config, read_config_file, thread_cap_from_env
from .csv_io import read_field, read_sampled_function, write_field, write_sampled_function
from .parallel import parallel_map, worker_count
from .validation import ValidationResult, validate_close

__all__ = [
    # General utils
    "configure_logging",
    "format_decimal",
    "log_debug",
    "log_error",
    "log_info",
    "log_warning",
    "parse_decimal",
    "safe_str",
    # Oracle cache
    "cached",
    "content_hash",
    "get_oracle_cache",
    # Configuration
    "RunConfig",
    "load_run_config",
    "read_config_file",
    "thread_cap_from_env",
    # CSV I/O
    "read_field",
    "read_sampled_function",
    "write_field",
    "write_sampled_function",
    # Parallel execution
    "parallel_map",
    "worker_count",
    # Validation
    "ValidationResult",
    "validate_close",
]
