"""
Worker pool initialization and management
Handles the shared thread pool used for independent trials and projections
"""

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from .config import settings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

THREAD_PREFIX = "rlplab-worker"

# Global pool instance
_pool: Optional[ThreadPoolExecutor] = None
_pool_size: int = 0


def init_pool(threads: Optional[int] = None) -> ThreadPoolExecutor:
    """Initialize the worker pool"""
    global _pool, _pool_size

    size = threads or settings.THREADS
    if _pool is not None and _pool_size == size:
        return _pool
    close_pool()
    _pool = ThreadPoolExecutor(max_workers=size, thread_name_prefix=THREAD_PREFIX)
    _pool_size = size
    logger.debug(f"Worker pool started with {size} threads")
    return _pool


def close_pool() -> None:
    """Shut the worker pool down"""
    global _pool, _pool_size

    if _pool is not None:
        _pool.shutdown(wait=True)
        logger.debug("Worker pool closed")
    _pool = None
    _pool_size = 0


def get_pool() -> ThreadPoolExecutor:
    """Get the pool, starting it on first use"""
    if _pool is None:
        return init_pool()
    return _pool


def parallel_map(fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
    """
    Apply fn to every item on the pool

    Results come back in input order, so reductions over them are order-fixed.
    A single worker runs inline, and so do calls made from a pool thread.
    """
    items = list(items)
    nested = threading.current_thread().name.startswith(THREAD_PREFIX)
    if len(items) <= 1 or settings.THREADS == 1 or nested:
        return [fn(item) for item in items]
    return list(get_pool().map(fn, items))
