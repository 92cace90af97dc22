"""
Threaded Angle Evaluation

Runs the far-field kernel over fixed-size angle chunks on a thread pool. The
chunk boundaries depend only on the chunk size, and ``Executor.map`` returns
results in submission order, so the output is identical for any worker count.
numpy releases the GIL inside the exp/sum work, which is where the time goes.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

from ..domain.farfield import CHUNK_SIZE, SerialAngleMapper
from .config import ComputeSettings


class ThreadedAngleMapper:
    """AngleMapper backed by a ThreadPoolExecutor"""

    def __init__(self, max_threads: int, chunk_size: int = CHUNK_SIZE):
        if max_threads < 1:
            raise ValueError("max_threads must be >= 1")
        if chunk_size < 1:
            raise ValueError("chunk_size must be >= 1")
        self.max_threads = max_threads
        self.chunk_size = chunk_size

    def map_chunks(self, fn: Callable[[slice], np.ndarray], n: int) -> np.ndarray:
        slices = [slice(start, min(start + self.chunk_size, n)) for start in range(0, n, self.chunk_size)]
        if not slices:
            return np.zeros(0, dtype=complex)
        if self.max_threads == 1 or len(slices) == 1:
            return np.concatenate([fn(sl) for sl in slices])
        with ThreadPoolExecutor(max_workers=min(self.max_threads, len(slices))) as pool:
            return np.concatenate(list(pool.map(fn, slices)))


def mapper_from_settings(compute: ComputeSettings):
    """Serial mapper for one thread, threaded otherwise (same chunking either way)"""
    if compute.max_threads == 1:
        return SerialAngleMapper(compute.chunk_size)
    return ThreadedAngleMapper(compute.max_threads, compute.chunk_size)
