"""Deterministic fan-out helpers.

Work is split into contiguous chunks, evaluated on a thread pool and merged
in chunk order, so results never depend on the number of workers.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor


def chunks(items, n):
    n = max(1, n)
    size = max(1, -(-len(items) // n))
    return [items[i : i + size] for i in range(0, len(items), size)]


def map_chunks(fn, items, jobs: int = 1):
    """[fn(chunk) for chunk in chunks(items)], run on ``jobs`` threads."""
    items = list(items)
    if jobs <= 1 or len(items) < 2:
        return [fn(items)] if items else []
    parts = chunks(items, jobs * 4)
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, parts))


def first_max(results):
    """Merge (value, witness) pairs: larger value wins, earlier chunk breaks ties."""
    best = None
    for r in results:
        if r is not None and (best is None or r[0] > best[0]):
            best = r
    return best
