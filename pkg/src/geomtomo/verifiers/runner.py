"""Work queue for independent checks."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
import os

__all__ = ["thread_count", "run_jobs"]


def thread_count(threads: int | None = None) -> int:
    """Worker count: explicit value, else GEOMTOMO_THREADS, else 1."""
    if threads is None:
        env = os.environ.get("GEOMTOMO_THREADS", "").strip()
        threads = int(env) if env else 1
    return max(1, int(threads))


def run_jobs(jobs, threads: int | None = None) -> list:
    """Run zero-argument callables; results come back in submission order."""
    jobs = list(jobs)
    workers = min(thread_count(threads), max(len(jobs), 1))
    if workers == 1:
        return [job() for job in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: job(), jobs))
