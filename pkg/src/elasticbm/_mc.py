"""Deterministic block fan-out for Monte Carlo sampling.

Paths are generated in fixed-size blocks, each fed by its own RNG substream,
and results are concatenated in block order.  The values therefore depend on
(seed, n, block size) only -- never on the number of worker threads.
"""
from concurrent.futures import ThreadPoolExecutor

import numpy as np

BLOCK_SIZE = 16384
CHUNK_STEPS = 256


def run_blocks(n, rng, worker, threads=1, block_size=BLOCK_SIZE):
    """Run ``worker(stream, count) -> ndarray`` over blocks of paths.

    ``rng`` is an RngStream; block ``i`` uses ``rng.block(i)``.  Results are
    concatenated along axis 0 in block order.
    """
    counts = []
    off = 0
    while off < n:
        counts.append(min(block_size, n - off))
        off += counts[-1]
    streams = [rng.block(i) for i in range(len(counts))]
    if threads <= 1 or len(counts) == 1:
        parts = [worker(st, c) for st, c in zip(streams, counts)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(worker, streams, counts))
    return np.concatenate(parts, axis=0)
