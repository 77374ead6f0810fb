from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar, Optional

from util.settings import load_settings

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """Map fn over items, preserving input order. Runs inline with one thread."""
    items = list(items)
    threads = threads or load_settings().threads
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(fn, items))
