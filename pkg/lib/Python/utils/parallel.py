"""
aniso Parallel Execution - ordered worker pool capped by ANISO_THREADS
"""

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

from utils.config import thread_cap_from_env
from utils.general import log_debug

# Try to import psutil, fall back to os.cpu_count if not available
try:
    import psutil

    HAS_PSUTIL = True
except ImportError:
    HAS_PSUTIL = False
    log_debug("psutil not available, using os.cpu_count for worker sizing")

T = TypeVar("T")
R = TypeVar("R")


def available_cores() -> int:
    """Physical cores when psutil can tell, logical cores otherwise."""
    if HAS_PSUTIL:
        physical = psutil.cpu_count(logical=False)
        if physical:
            return physical
    return os.cpu_count() or 1


def worker_count(n_items: int) -> int:
    """Number of workers for n_items tasks under the ANISO_THREADS cap."""
    cap = thread_cap_from_env()
    workers = available_cores() if cap == 0 else cap
    return max(1, min(workers, n_items))


def parallel_map(func: Callable[[T], R], items: Iterable[T]) -> List[R]:
    """Apply func to every item, returning results in input order.

    Results never depend on scheduling, so reports stay deterministic.
    Exceptions propagate from the first failing item in input order.
    """
    items = list(items)
    if not items:
        return []
    workers = worker_count(len(items))
    if workers == 1:
        return [func(item) for item in items]
    log_debug(f"parallel_map: {len(items)} items on {workers} workers")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
