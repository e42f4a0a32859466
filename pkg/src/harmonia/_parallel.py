"""Order-preserving parallel map over sample indices."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def thread_count() -> int:
    """Worker count: HARMONIA_THREADS if set, else the CPU count."""
    raw = os.environ.get("HARMONIA_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ValueError(f"HARMONIA_THREADS must be an integer, got {raw!r}") from None
    return os.cpu_count() or 1


def pmap(fn: Callable[[T], R], items: Iterable[T], threads: int | None = None) -> list[R]:
    """``[fn(x) for x in items]``, evaluated on a thread pool.

    The compiled kernels release the GIL, so threads give real speedup;
    results always come back in input order.
    """
    items = list(items)
    n = threads or thread_count()
    if n <= 1 or len(items) < 64:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * n))))
