"""
Task-level parallelism capped by CHAINWAVE_THREADS
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from tqdm import tqdm

from config import MAX_WORKERS

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(func: Callable[[T], R], items: Iterable[T],
                 max_workers: Optional[int] = None,
                 desc: Optional[str] = None) -> List[R]:
    """
    Apply func to every item, preserving order

    Args:
        func: Pure function of one item
        items: Work items
        max_workers: Thread cap, defaults to CHAINWAVE_THREADS
        desc: Progress bar label; no bar when None

    Returns:
        Results in input order
    """
    work = list(items)
    workers = min(max_workers or MAX_WORKERS, max(1, len(work)))

    if workers == 1:
        iterator = tqdm(work, desc=desc, leave=False) if desc else work
        return [func(item) for item in iterator]

    logger.debug(f"Dispatching {len(work)} tasks on {workers} threads")
    with ThreadPoolExecutor(max_workers=workers) as executor:
        results = executor.map(func, work)
        if desc:
            results = tqdm(results, total=len(work), desc=desc, leave=False)
        return list(results)


def chunk_bounds(size: int, parts: int) -> List[slice]:
    """Split range(size) into at most parts contiguous slices"""
    parts = max(1, min(parts, size))
    edges = [round(i * size / parts) for i in range(parts + 1)]
    return [slice(edges[i], edges[i + 1]) for i in range(parts) if edges[i + 1] > edges[i]]
