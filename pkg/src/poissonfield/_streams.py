"""Reproducible random substreams and an order-preserving worker pool."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

import numpy as np


def chunk_bounds(n: int, size: int):
    return [(start, min(start + size, n)) for start in range(0, n, size)]


def chunk_generator(seed, index: int, tag: int = 0) -> np.random.Generator:
    """Generator for chunk ``index`` of the stream named ``tag``.

    The stream is a pure function of ``(seed, tag, index)``, never of which
    worker evaluates it.
    """
    if isinstance(seed, np.random.SeedSequence):
        ss = np.random.SeedSequence(seed.entropy, spawn_key=tuple(seed.spawn_key) + (tag, index))
    else:
        if seed is None:
            raise ValueError("a seed is required for reproducible streams")
        ss = np.random.SeedSequence(int(seed), spawn_key=(tag, index))
    return np.random.Generator(np.random.PCG64(ss))


def map_chunks(fn, tasks, workers: int = 1) -> list:
    """``[fn(t) for t in tasks]``, optionally across processes, in task order."""
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))
