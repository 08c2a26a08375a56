"""Thread cap shared by the solvers (``PENCILSPEC_THREADS``)."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def max_workers() -> int:
    try:
        return max(1, int(os.environ["PENCILSPEC_THREADS"]))
    except (KeyError, ValueError):
        return os.cpu_count() or 1


def run_all(*calls):
    """Run zero-argument callables, concurrently when more than one worker is allowed."""
    if max_workers() == 1 or len(calls) < 2:
        return [c() for c in calls]
    with ThreadPoolExecutor(max_workers=min(max_workers(), len(calls))) as pool:
        futures = [pool.submit(c) for c in calls]
        return [f.result() for f in futures]
