"""Resource configuration: thread count, node budget, ball-size cap."""

from __future__ import annotations

import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .errors import BudgetExceeded

DEFAULT_BUDGET = 10**7
DEFAULT_BALL_CAP = 10**6


@dataclass(frozen=True)
class Config:
    threads: int = os.cpu_count() or 1
    budget: int = DEFAULT_BUDGET
    ball_cap: int = DEFAULT_BALL_CAP

    def new_budget(self) -> "Budget":
        return Budget(self.budget)


class Budget:
    """Shared search-node counter. Thread safe; callers charge in batches."""

    def __init__(self, limit: int = DEFAULT_BUDGET):
        self.limit = limit
        self.used = 0
        self._lock = threading.Lock()

    def charge(self, n: int) -> None:
        with self._lock:
            self.used += n
            if self.used > self.limit:
                raise BudgetExceeded(nodes=self.used)

    @property
    def exhausted(self) -> bool:
        return self.used > self.limit


def ordered_map(fn, items, threads: int):
    """``list(map(fn, items))`` spread over a thread pool; result order is input order."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(fn, items))


def first_hit(fn, items, threads: int):
    """Return ``fn(x)`` for the first ``x`` (in input order) where it is not None.

    With several threads, items are evaluated in chunks of ``threads``; the
    earliest hit inside the first successful chunk wins, so the answer never
    depends on scheduling.
    """
    items = list(items)
    if threads <= 1:
        for x in items:
            r = fn(x)
            if r is not None:
                return r
        return None
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for start in range(0, len(items), threads):
            for r in pool.map(fn, items[start:start + threads]):
                if r is not None:
                    return r
    return None
