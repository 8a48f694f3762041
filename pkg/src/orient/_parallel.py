"""Thread pool helper with schedule-independent results.

Work is always cut into the same fixed-size blocks no matter how many threads
run them, and results come back in block order, so callers that reduce in
that order get bit-identical answers for any thread count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, TypeVar

T = TypeVar("T")

ENV_VAR = "ORIENT_THREADS"

_num_threads: Optional[int] = None


def set_num_threads(n: Optional[int]) -> None:
    """Set the worker count; ``None`` restores the default."""
    global _num_threads
    if n is not None and n < 1:
        raise ValueError("thread count must be positive")
    _num_threads = n


def get_num_threads() -> int:
    if _num_threads is not None:
        return _num_threads
    env = os.environ.get(ENV_VAR)
    if env:
        try:
            value = int(env)
        except ValueError:
            value = 0
        if value >= 1:
            return value
    return os.cpu_count() or 1


def block_ranges(n: int, block: int) -> List[range]:
    return [range(start, min(start + block, n)) for start in range(0, n, block)]


def map_blocks(fn: Callable[[range], T], n: int, block: int) -> List[T]:
    blocks = block_ranges(n, block)
    threads = min(get_num_threads(), len(blocks))
    if threads <= 1:
        return [fn(b) for b in blocks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, blocks))


def pairwise_sum(parts: List[T]) -> T:
    """Sum in a fixed binary-tree order."""
    if not parts:
        raise ValueError("nothing to sum")
    while len(parts) > 1:
        merged = [parts[i] + parts[i + 1] for i in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            merged.append(parts[-1])
        parts = merged
    return parts[0]
