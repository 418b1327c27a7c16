"""Deterministic worker-pool mapping for sweep points."""
from __future__ import annotations

import multiprocessing
import os


def _limit_blas_threads():
    try:
        import threadpoolctl

        threadpoolctl.threadpool_limits(1)
    except Exception:
        pass


def worker_count(requested: int | None = None) -> int:
    """Resolve the worker count: argument, HERALD_SIM_WORKERS, then CPU count."""
    if requested is not None:
        return max(1, int(requested))
    env = os.environ.get("HERALD_SIM_WORKERS")
    if env:
        return max(1, int(env))
    return max(1, os.cpu_count() or 1)


def map_jobs(fn, items, workers: int | None = None) -> list:
    """Map `fn` over `items`, preserving input order regardless of worker count."""
    n = worker_count(workers)
    items = list(items)
    if n <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    ctx = multiprocessing.get_context("fork")
    with ctx.Pool(min(n, len(items)), initializer=_limit_blas_threads) as pool:
        return list(pool.map(fn, items, chunksize=1))
