"""Bounded min-heap used to reorder projected positions into sorted streams."""

from __future__ import annotations

import heapq


class BoundedMinHeap:
    """Min-heap of word positions that spills its minimum once it grows too long.

    Equal positions share one entry with a multiplicity, so ``len(heap)`` is the
    number of *distinct* positions held. A projection stream built from postings
    whose offsets are bounded by ``max_distance`` has at most ``2 * max_distance``
    distinct positions that may still be undercut by a later posting, so spilling
    the minimum whenever the heap holds more than that keeps the output sorted
    even when several postings share one anchor position.
    """

    __slots__ = ("capacity", "_heap", "_counts", "ops", "max_len")

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self._heap: list[int] = []
        self._counts: dict[int, int] = {}
        self.ops = 0
        self.max_len = 0

    def __len__(self) -> int:
        return len(self._heap)

    def push(self, position: int) -> list[int]:
        """Add a position; returns the positions spilled to keep the bound."""
        self.ops += 1
        count = self._counts.get(position)
        if count is not None:
            self._counts[position] = count + 1
            return []
        self._counts[position] = 1
        heapq.heappush(self._heap, position)
        if len(self._heap) > self.capacity:
            return self.pop_min()
        if len(self._heap) > self.max_len:
            self.max_len = len(self._heap)
        return []

    def pop_min(self) -> list[int]:
        """Remove the smallest position and return all of its copies."""
        self.ops += 1
        position = heapq.heappop(self._heap)
        return [position] * self._counts.pop(position)

    def drain(self) -> list[int]:
        out: list[int] = []
        while self._heap:
            out.extend(self.pop_min())
        return out
