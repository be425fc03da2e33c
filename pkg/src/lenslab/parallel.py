"""Deterministic fan-out over sample indices.

Work is partitioned by index; results land in index order and reductions run
over the ordered array, so outputs are bit-identical for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor


def map_indexed(fn, n: int, threads: int = 1) -> list:
    """``[fn(0), ..., fn(n-1)]`` computed with up to ``threads`` workers."""
    if threads <= 1 or n <= 1:
        return [fn(i) for i in range(n)]
    results = [None] * n
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = {pool.submit(fn, i): i for i in range(n)}
        for fut in futures:
            results[futures[fut]] = fut.result()
    return results
