"""Seeded random streams and chunked sampling.

A run is reproducible from ``(seed, chunk_size)`` alone: chunk ``i`` always
draws from the stream ``SeedSequence(seed, spawn_key=(stream, i))`` and
results are stitched in chunk order, so the thread count never changes
the output.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

DEFAULT_CHUNK = 65536


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for ``(seed, key...)``."""
    if seed is None or int(seed) < 0 or int(seed) >= 2 ** 64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=key)))


def default_threads() -> int:
    return os.cpu_count() or 1


def chunk_plan(n: int, chunk_size: int = DEFAULT_CHUNK) -> list[int]:
    if n < 0 or chunk_size < 1:
        raise ValueError("bad chunk plan")
    sizes = [chunk_size] * (n // chunk_size)
    if n % chunk_size:
        sizes.append(n % chunk_size)
    return sizes


def sample_chunked(
    draw: Callable[[np.random.Generator, int], np.ndarray],
    n: int,
    seed: int,
    stream_id: int = 0,
    chunk_size: int = DEFAULT_CHUNK,
    threads: int | None = None,
) -> np.ndarray:
    """Call ``draw(rng, size)`` per chunk and concatenate in chunk order."""
    sizes = chunk_plan(n, chunk_size)
    if not sizes:
        return np.empty(0)
    jobs = [(stream(seed, stream_id, i), size) for i, size in enumerate(sizes)]
    threads = threads or default_threads()
    if threads == 1 or len(jobs) == 1:
        parts = [draw(rng, size) for rng, size in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda job: draw(*job), jobs))
    return np.concatenate([np.asarray(p, dtype=float) for p in parts])
