"""
Worker pool for independent replications.
Infrastructure layer - handles process-level parallelism.
"""

import logging
import multiprocessing as mp
import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Optional, TypeVar


logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')


def available_workers() -> int:
    """Number of CPUs usable by this process."""
    try:
        return max(len(os.sched_getaffinity(0)), 1)
    except AttributeError:
        return os.cpu_count() or 1


class WorkerPool:
    """
    Maps a picklable top-level function over independent tasks.

    Results come back in task order, so reductions over them are
    deterministic regardless of the number of workers. With one worker
    tasks run in-process.
    """

    def __init__(self, workers: Optional[int] = 1):
        """
        Initialize pool.

        Args:
            workers: Number of processes (None or 0 uses all available CPUs)
        """
        if workers is not None and workers < 0:
            raise ValueError(f"Worker count must be nonnegative, got {workers}")
        self.workers = workers or available_workers()

    def map(self, fn: Callable[[T], R], tasks: Iterable[T]) -> list[R]:
        tasks = list(tasks)
        if self.workers <= 1 or len(tasks) <= 1:
            return [fn(task) for task in tasks]

        logger.debug(f"Dispatching {len(tasks)} tasks to {self.workers} workers")
        ctx = mp.get_context("spawn")
        chunksize = max(len(tasks) // (4 * self.workers), 1)
        with ProcessPoolExecutor(max_workers=self.workers, mp_context=ctx) as pool:
            return list(pool.map(fn, tasks, chunksize=chunksize))
