"""Ordinal-ordered parallel map for replication-level parallelism.

Results are always collected in input order, so any reduction over them is
invariant to the worker count (the per-item work itself must be a
deterministic function of its arguments, which all callers guarantee by
deriving per-item seeds from (seed, ordinal)).
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

__all__ = ["ordered_map"]


def ordered_map(fn, items, workers: int = 1) -> list:
    """Apply fn to each item, preserving input order in the result list."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
