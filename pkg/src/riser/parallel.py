"""Process-level fan-out for pure, picklable evaluations.

``RISER_THREADS`` caps the worker count (default: CPU count).  Results are
always returned in input order, so output never depends on scheduling.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence

#: below this many items per worker a pool costs more than it saves
MIN_CHUNK = 500


def worker_count() -> int:
    """Worker cap from ``RISER_THREADS``; invalid values fall back to 1."""
    raw = os.environ.get("RISER_THREADS")
    if raw is None:
        return max(1, os.cpu_count() or 1)
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def map_chunks(func: Callable, context, items: Sequence, min_chunk: int = MIN_CHUNK) -> list:
    """``func(context, chunk)`` over contiguous chunks of ``items``, concatenated.

    ``func`` must be a module-level function and ``context`` picklable.
    """
    items = list(items)
    workers = min(worker_count(), max(1, len(items) // min_chunk))
    if workers <= 1:
        return list(func(context, items))
    size = -(-len(items) // workers)
    chunks = [items[i : i + size] for i in range(0, len(items), size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(func, [context] * len(chunks), chunks))
    return [v for part in parts for v in part]
