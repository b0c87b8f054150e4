"""Worker-thread configuration shared by the engine.

Every parallel section maps a pure function over an ordered list and
collects results in input order, so output never depends on the number of
workers.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager

_threads = 1


def get_threads() -> int:
    return _threads


def set_threads(n: int) -> None:
    global _threads
    if int(n) < 1:
        raise ValueError(f"thread count must be >= 1, got {n}")
    _threads = int(n)


@contextmanager
def threads(n: int):
    """Temporarily run engine parallel sections with ``n`` workers."""
    old = _threads
    set_threads(n)
    try:
        yield
    finally:
        set_threads(old)


def parallel_map(fn, items):
    items = list(items)
    if _threads == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=_threads) as pool:
        return list(pool.map(fn, items))
