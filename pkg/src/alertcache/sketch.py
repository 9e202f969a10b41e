"""Count-min frequency sketch with 4-bit saturating counters and periodic aging."""

from __future__ import annotations

from .rng import FNV_OFFSET, FNV_PRIME, MASK32

DEPTH = 4
COUNTER_MAX = 15


def next_power_of_two(n: int) -> int:
    return 1 if n <= 1 else 1 << (n - 1).bit_length()


def row_hash(key: str, salt: int) -> int:
    """FNV-1a over the salt byte followed by the UTF-8 key."""
    h = FNV_OFFSET
    for b in bytes((salt,)) + key.encode("utf-8"):
        h ^= b
        h = (h * FNV_PRIME) & MASK32
    return h


class FrequencySketch:
    """TinyLFU-style popularity estimate sized for a cache of ``capacity`` entries.

    Each of the 4 rows has ``next_power_of_two(4 * capacity)`` counters. After
    ``10 * capacity`` increments every counter is halved, as is the increment
    count, so old popularity fades.
    """

    def __init__(self, capacity: int) -> None:
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.width = next_power_of_two(4 * capacity)
        self.sample_size = 10 * capacity
        self.increment_count = 0
        self.resets = 0
        self._mask = self.width - 1
        self._rows = [[0] * self.width for _ in range(DEPTH)]

    def _slots(self, key: str) -> list[int]:
        return [row_hash(key, salt) & self._mask for salt in range(DEPTH)]

    def estimate(self, key: str) -> int:
        return min(row[i] for row, i in zip(self._rows, self._slots(key)))

    def increment(self, key: str) -> None:
        for row, i in zip(self._rows, self._slots(key)):
            if row[i] < COUNTER_MAX:
                row[i] += 1
        self.increment_count += 1
        if self.increment_count >= self.sample_size:
            self.reset()

    def reset(self) -> None:
        for row in self._rows:
            row[:] = [c >> 1 for c in row]
        self.increment_count >>= 1
        self.resets += 1
