"""Seeded fan-out whose results do not depend on the number of workers.

Work is cut into fixed-size chunks. Chunk ``k`` of stage ``s`` draws from
``SeedSequence(seed, spawn_key=(s, k))``, and results are returned in chunk order,
so thread scheduling cannot change any output.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np


def task_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))


def chunk_sizes(total: int, chunk: int) -> list:
    return [min(chunk, total - start) for start in range(0, total, chunk)]


def map_chunks(fn, total: int, chunk: int, seed: int, stage: int, workers: int = 1) -> list:
    """``[fn(count_k, rng_k) for each chunk k]``, evaluated on ``workers`` threads."""
    sizes = chunk_sizes(total, chunk)
    jobs = [(size, task_rng(seed, stage, k)) for k, size in enumerate(sizes)]
    if workers <= 1 or len(jobs) <= 1:
        return [fn(size, rng) for size, rng in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))


def map_ordered(fn, items, workers: int = 1) -> list:
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
