"""
aniso Run Configuration - flat key=value parameter files merged with CLI flags
"""

import os
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, Mapping, Optional

from utils.error_handling import DataFormatError, UsageError
from utils.general import log_debug

ENV_THREADS = "ANISO_THREADS"


@dataclass(frozen=True)
class RunConfig:
    """Immutable description of one CLI run."""

    subcommand: str
    params: Mapping[str, Any] = field(default_factory=dict)
    seed: int = 0
    outputs: Mapping[str, str] = field(default_factory=dict)

    def get(self, key, default=None):
        return self.params.get(key, default)

    def require(self, key):
        if key not in self.params or self.params[key] is None:
            raise UsageError(f"Missing required parameter: {key}", operation=self.subcommand)
        return self.params[key]


def parse_value(text: str) -> Any:
    """Parse a config value: int, float, comma-separated float list, or string."""
    text = text.strip()
    if "," in text:
        return [parse_value(part) for part in text.split(",") if part.strip()]
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    lowered = text.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    return text


def read_config_file(path: str) -> Dict[str, Any]:
    """Read a flat key=value config file.

    Lines starting with '#' and blank lines are ignored. Duplicate keys and
    lines without '=' raise DataFormatError.
    """
    if not os.path.exists(path):
        raise UsageError(f"Config file not found: {path}", operation="read_config")

    params: Dict[str, Any] = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DataFormatError(
                    f"{path}:{line_no}: expected key = value", operation="read_config", details={"line": raw.rstrip()}
                )
            key, value = line.split("=", 1)
            key = key.strip().replace("-", "_")
            if not key:
                raise DataFormatError(f"{path}:{line_no}: empty key", operation="read_config")
            if key in params:
                raise DataFormatError(f"{path}:{line_no}: duplicate key '{key}'", operation="read_config")
            params[key] = parse_value(value)
    log_debug(f"Loaded {len(params)} parameters from {path}")
    return params


def load_run_config(
    subcommand: str,
    flag_params: Mapping[str, Any],
    config_path: Optional[str],
    allowed_keys: Iterable[str],
    seed: int = 0,
    outputs: Optional[Mapping[str, str]] = None,
) -> RunConfig:
    """Merge file parameters with flags (flags win) and reject unknown keys."""
    allowed = set(allowed_keys) | {"seed"}
    merged: Dict[str, Any] = {}
    if config_path:
        file_params = read_config_file(config_path)
        unknown = sorted(set(file_params) - allowed)
        if unknown:
            raise UsageError(
                f"Unknown configuration keys for '{subcommand}': {', '.join(unknown)}",
                operation="load_run_config",
                details={"unknown": unknown, "allowed": sorted(allowed)},
            )
        merged.update(file_params)

    for key, value in flag_params.items():
        if value is not None:
            merged[key] = value

    if "seed" in merged:
        seed = int(merged.pop("seed"))

    return RunConfig(subcommand=subcommand, params=dict(sorted(merged.items())), seed=seed, outputs=dict(outputs or {}))


def thread_cap_from_env() -> int:
    """Worker cap requested through ANISO_THREADS (0 means auto)."""
    raw = os.environ.get(ENV_THREADS, "0").strip() or "0"
    try:
        value = int(raw)
    except ValueError as e:
        raise UsageError(f"{ENV_THREADS} must be an integer, got '{raw}'", operation="thread_cap") from e
    if value < 0:
        raise UsageError(f"{ENV_THREADS} must be >= 0", operation="thread_cap")
    return value
