"""Deterministic random-number plumbing for the Monte Carlo drivers.

All sampling in this package goes through counter-based Philox streams keyed
by (master seed, substream index).  Trials are partitioned into fixed-size
chunks with one substream per chunk and the chunk results are reduced in
index order, so estimates are bit-identical for any worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

import numpy as np

DEFAULT_CHUNK = 1 << 14

T = TypeVar("T")


def substream(seed: int, *key: int) -> np.random.Generator:
    """Generator for the Philox substream identified by (seed, *key)."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def worker_count() -> int:
    raw = os.environ.get("PERM_MOMENTS_THREADS", "1")
    try:
        count = int(raw)
    except ValueError:
        count = 1
    return max(1, count)


def map_chunks(fn: Callable[[int, int], T], total: int, chunk: int = DEFAULT_CHUNK) -> list[T]:
    """Apply ``fn(chunk_index, chunk_size)`` over a fixed partition of ``total`` trials.

    Results are returned in chunk order regardless of how many workers ran.
    """
    sizes = [min(chunk, total - start) for start in range(0, total, chunk)]
    workers = worker_count()
    if workers == 1 or len(sizes) <= 1:
        return [fn(i, size) for i, size in enumerate(sizes)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, i, size) for i, size in enumerate(sizes)]
        return [f.result() for f in futures]


def kahan_sum(values: Sequence[complex]) -> complex:
    """Compensated sum, so chunked reductions do not depend on grouping."""
    total = 0.0 + 0.0j
    carry = 0.0 + 0.0j
    for v in values:
        y = v - carry
        t = total + y
        carry = (t - total) - y
        total = t
    return total
