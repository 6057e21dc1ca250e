from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
U = TypeVar("U")

THREADS_ENV = "SHELLAV_THREADS"


def _worker_count(configured: int | None = None) -> int:
    """
    Number of worker processes to use.

    Parameters
    ----------
    configured : int | None, optional
        The `threads.workers` setting; 0 or None means one worker per CPU.
        default = None

    Returns
    -------
    int
        The worker count, capped by the SHELLAV_THREADS environment variable
        when it is set to a positive integer.
    """
    workers = configured or os.cpu_count() or 1
    cap = os.environ.get(THREADS_ENV)
    if cap:
        try:
            limit = int(cap)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {cap!r}") from None
        if limit < 1:
            raise ValueError(f"{THREADS_ENV} must be at least 1, got {limit}")
        workers = min(workers, limit)
    return max(1, workers)


def _parallel_map(func: Callable[[T], U], items: Iterable[T], workers: int = 1) -> list[U]:
    """Ordered map, in a process pool when more than one worker is requested."""
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [func(item) for item in items]
    chunksize = max(1, len(items) // (4 * workers))
    logger.debug("mapping %d items over %d workers", len(items), workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items, chunksize=chunksize))
