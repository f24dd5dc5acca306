from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def resolve_threads(threads: int) -> int:
    if threads < 0:
        raise ValueError(f"threads must be >= 0, got {threads}")
    return threads or (os.cpu_count() or 1)


def run_indexed(fn, n: int, threads: int = 1) -> None:
    """Call ``fn(i)`` for ``i in range(n)``; each call must write disjoint output."""
    workers = min(resolve_threads(threads), max(n, 1))
    if workers == 1:
        for i in range(n):
            fn(i)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for _ in pool.map(fn, range(n)):
            pass
