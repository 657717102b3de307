"""
aniso Oracle Cache - content-addressed memoization of reference values
"""

import functools
import hashlib
import json
import threading
from typing import Any, Callable, Dict, Optional

import numpy as np

from utils.general import log_debug

DEFAULT_MAX_ENTRIES = 4096


def _canonical(value: Any) -> Any:
    """Reduce arguments to JSON-stable primitives for hashing."""
    if isinstance(value, float):
        return {"f": value.hex()}
    if isinstance(value, (np.floating,)):
        return {"f": float(value).hex()}
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, np.ndarray):
        return {"a": [_canonical(v) for v in value.ravel().tolist()], "shape": list(value.shape)}
    if isinstance(value, complex):
        return {"c": [value.real.hex(), value.imag.hex()]}
    if isinstance(value, (list, tuple)):
        return [_canonical(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _canonical(v) for k, v in sorted(value.items())}
    if hasattr(value, "cache_key"):
        return _canonical(value.cache_key())
    return value


def content_hash(name: str, *args: Any, **kwargs: Any) -> str:
    """SHA-256 of a canonical JSON encoding of (name, args, kwargs)."""
    payload = json.dumps([name, _canonical(list(args)), _canonical(kwargs)], sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class OracleCache:
    """Thread-safe cache: lock-free reads, single-writer insertion."""

    def __init__(self, max_entries: int = DEFAULT_MAX_ENTRIES):
        self.max_entries = max_entries
        self._entries: Dict[str, Any] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def get(self, key: str) -> Optional[Any]:
        value = self._entries.get(key)
        if value is not None:
            self.hits += 1
        return value

    def put(self, key: str, value: Any) -> Any:
        with self._lock:
            existing = self._entries.get(key)
            if existing is not None:
                return existing
            if len(self._entries) >= self.max_entries:
                # Oldest insertion first
                self._entries.pop(next(iter(self._entries)))
            self._entries[key] = value
            self.misses += 1
        return value

    def clear(self) -> None:
        with self._lock:
            self._entries.clear()
            self.hits = 0
            self.misses = 0

    def stats(self) -> Dict[str, int]:
        return {"entries": len(self._entries), "hits": self.hits, "misses": self.misses}


# Global cache instance
_oracle_cache = OracleCache()


def get_oracle_cache() -> OracleCache:
    """Get the global oracle cache."""
    return _oracle_cache


def cached(name: str) -> Callable:
    """Decorator memoizing a pure function in the global oracle cache."""

    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            key = content_hash(name, *args, **kwargs)
            hit = _oracle_cache.get(key)
            if hit is not None:
                return hit
            value = func(*args, **kwargs)
            log_debug(f"oracle cache insert {name} {key[:12]}")
            return _oracle_cache.put(key, value)

        return wrapper

    return decorator
