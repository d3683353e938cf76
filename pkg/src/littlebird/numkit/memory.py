"""Instrumented allocation accounting for Tensor buffers.

The tracker is a proxy for peak memory: it counts bytes of live Tensor data
and gradient buffers, not interpreter or numpy temporaries.
"""

from __future__ import annotations

import threading
from collections.abc import Iterator
from contextlib import contextmanager
from contextvars import ContextVar


class AllocationTracker:
    """Counts live and peak Tensor bytes while active."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self.live_bytes = 0
        self.peak_bytes = 0
        self.allocations = 0

    def allocate(self, nbytes: int) -> None:
        with self._lock:
            self.live_bytes += nbytes
            self.allocations += 1
            if self.live_bytes > self.peak_bytes:
                self.peak_bytes = self.live_bytes

    def release(self, nbytes: int) -> None:
        with self._lock:
            self.live_bytes -= nbytes


_ACTIVE: ContextVar[AllocationTracker | None] = ContextVar("allocation_tracker", default=None)


def active_tracker() -> AllocationTracker | None:
    """Tracker of the innermost `track_allocations` block, if any."""
    return _ACTIVE.get()


@contextmanager
def track_allocations() -> Iterator[AllocationTracker]:
    """Count Tensor allocations made inside the block."""
    tracker = AllocationTracker()
    token = _ACTIVE.set(tracker)
    try:
        yield tracker
    finally:
        _ACTIVE.reset(token)
