"""Per-query work counters."""

from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass
class Metrics:
    postings_read: int = 0
    bytes_read: int = 0
    wall_time: float = 0.0
    heap_ops: int = 0
    subquery_length: int = 0
    max_heap_len: int = 0

    def merge(self, other: "Metrics") -> None:
        self.postings_read += other.postings_read
        self.bytes_read += other.bytes_read
        self.wall_time += other.wall_time
        self.heap_ops += other.heap_ops
        self.subquery_length = max(self.subquery_length, other.subquery_length)
        self.max_heap_len = max(self.max_heap_len, other.max_heap_len)

    def as_dict(self) -> dict:
        return asdict(self)
