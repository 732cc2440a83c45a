"""Order-preserving map over quadrature nodes."""
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, TypeVar

try:
    from .logger import logger
except ImportError:
    from utils.logger import logger

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(fn: Callable[[T], R], items: Iterable[T], jobs: int = 1, chunksize: int = 16) -> List[R]:
    """map(fn, items) in `jobs` worker processes; results keep the input order.

    fn and the items must be picklable when jobs > 1.
    """
    items = list(items)
    if jobs <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    logger.debug(f"parallel_map over {len(items)} items with {jobs} workers")
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=chunksize))
