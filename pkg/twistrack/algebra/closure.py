"""Breadth-first closure with a deterministic, shardable frontier."""

from __future__ import annotations

import logging
from collections.abc import Callable, Hashable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

from twistrack.services.exceptions import BudgetExceeded

logger = logging.getLogger(__name__)

E = TypeVar("E")
K = TypeVar("K", bound=Hashable)


def _shards(items: Sequence, workers: int) -> list[Sequence]:
    if workers <= 1 or len(items) < 2 * workers:
        return [items]
    return [items[i::workers] for i in range(workers)]


def bfs_closure(
    seeds: Iterable[E],
    step: Callable[[E], Iterable[E]],
    key: Callable[[E], K],
    *,
    cap: int,
    workers: int = 1,
    label: str = "closure",
) -> dict[K, E]:
    """Return every element reachable from ``seeds`` under ``step``.

    The result is keyed by ``key`` and ordered by increasing key. Each layer's
    frontier is split across ``workers`` threads and merged in shard order, so
    the output does not depend on the worker count.
    """

    seen: dict[K, E] = {}
    for seed in seeds:
        seen.setdefault(key(seed), seed)
    if len(seen) > cap:
        raise BudgetExceeded(f"{label} exceeds cap {cap}", limit=cap)
    frontier = sorted(seen.items(), key=lambda item: item[0])

    def expand(shard: Sequence[tuple[K, E]]) -> list[tuple[K, E]]:
        found: list[tuple[K, E]] = []
        for _, element in shard:
            for image in step(element):
                found.append((key(image), image))
        return found

    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        depth = 0
        while frontier:
            shards = _shards(frontier, workers)
            if pool is not None and len(shards) > 1:
                results = list(pool.map(expand, shards))
            else:
                results = [expand(shard) for shard in shards]
            fresh: dict[K, E] = {}
            for found in results:
                for k, element in found:
                    if k not in seen and k not in fresh:
                        fresh[k] = element
            seen.update(fresh)
            if len(seen) > cap:
                raise BudgetExceeded(f"{label} exceeds cap {cap}", limit=cap)
            frontier = sorted(fresh.items(), key=lambda item: item[0])
            depth += 1
            logger.debug("%s depth %d: %d new, %d total", label, depth, len(fresh), len(seen))
    finally:
        if pool is not None:
            pool.shutdown(wait=True)

    return dict(sorted(seen.items(), key=lambda item: item[0]))
