# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import logging
from multiprocessing import Pool, cpu_count
from typing import Callable, Iterable, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def resolve_workers(workers: int | None) -> int:
    if workers is None or workers <= 0:
        return cpu_count()
    return workers


def run_ordered(fn: Callable[[T], R], items: Iterable[T], workers: int | None = 1) -> list[R]:
    """Map `fn` over `items`, results in input order.

    `fn` must be a module-level function when `workers` > 1. Each item carries
    its own seed, so results do not depend on scheduling.
    """
    batch = list(items)
    n = min(resolve_workers(workers), len(batch))
    if n <= 1:
        return [fn(item) for item in batch]
    logger.debug("running %d tasks on %d processes", len(batch), n)
    with Pool(processes=n) as pool:
        return pool.map(fn, batch)
