"""Ordered thread-pool map used by estimators and the pipeline."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from .settings import settings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def map_ordered(
    fn: Callable[[T], R],
    items: Iterable[T],
    max_workers: Optional[int] = None,
) -> List[R]:
    """
    Apply fn to every item, possibly in parallel, and return results in input order.

    Args:
        fn: Pure function of one work item
        items: Work items
        max_workers: Worker cap (defaults to HETERO_TOPO_THREADS)

    Returns:
        List of results, ordered like items
    """
    work = list(items)
    workers = max_workers or settings.runtime.worker_count()
    workers = max(1, min(workers, len(work)))

    if workers == 1:
        return [fn(item) for item in work]

    logger.debug(f"Running {len(work)} work items on {workers} threads")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, work))
