"""Mulberry32 generator and seed derivation.

Every random draw in the package goes through :class:`Rng`, so a run is a
pure function of its 32-bit seed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

MASK32 = 0xFFFFFFFF
FNV_OFFSET = 2166136261
FNV_PRIME = 16777619


def fnv1a32(data: bytes) -> int:
    h = FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * FNV_PRIME) & MASK32
    return h


def derive_seed(seed_text: str) -> int:
    """Hash a seed string (e.g. ``"FISHDINNER"``) to a 32-bit seed with FNV-1a."""
    if not seed_text:
        raise ValueError("seed text must be nonempty")
    return fnv1a32(seed_text.encode("utf-8"))


class Rng:
    """Mulberry32: 32 bits of state, one output per state step."""

    def __init__(self, seed: int) -> None:
        self.state = seed & MASK32

    def next_u32(self) -> int:
        self.state = (self.state + 0x6D2B79F5) & MASK32
        t = self.state
        t = ((t ^ (t >> 15)) * (t | 1)) & MASK32
        t ^= (t + ((t ^ (t >> 7)) * (t | 61) & MASK32)) & MASK32
        return (t ^ (t >> 14)) & MASK32

    def next_float(self) -> float:
        """Uniform in [0, 1)."""
        return self.next_u32() / 4294967296.0

    def next_range(self, lo: float, hi: float) -> float:
        if not lo < hi:
            raise ValueError(f"empty range [{lo}, {hi})")
        return lo + (hi - lo) * self.next_float()

    def next_index(self, n: int) -> int:
        """Uniform integer in ``range(n)``."""
        if n < 1:
            raise ValueError("n must be positive")
        return min(int(self.next_float() * n), n - 1)

    def next_choice(self, weights: Sequence[float]) -> int:
        """Weighted index: one draw against the cumulative distribution."""
        if not weights:
            raise ValueError("weights must be nonempty")
        if any(w < 0 for w in weights):
            raise ValueError("weights must be nonnegative")
        total = math.fsum(weights)
        if total <= 0:
            raise ValueError("weights must have a positive sum")
        target = self.next_float() * total
        acc = 0.0
        last = 0
        for i, w in enumerate(weights):
            if w <= 0:
                continue
            acc += w
            last = i
            if target < acc:
                return i
        return last

    def next_exponential(self, mean: float) -> float:
        """Exponential variate with the given mean (inverse CDF, one draw)."""
        return -mean * math.log1p(-self.next_float())

    def spawn(self, salt: int) -> "Rng":
        """An independent stream keyed on this generator's current state.

        Does not advance ``self``.
        """
        mixed = fnv1a32((self.state ^ (salt * 0x9E3779B9 & MASK32)).to_bytes(4, "little"))
        return Rng(mixed)


class SeedMode(str, enum.Enum):
    FIXED = "fixed"
    PER_REPLICATE = "perReplicate"


@dataclass(frozen=True)
class SeedSpec:
    seedText: str = "FISHDINNER"
    mode: SeedMode = SeedMode.FIXED
    replicates: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", SeedMode(self.mode))
        if not self.seedText:
            raise ValueError("seed text must be nonempty")
        if self.replicates < 1:
            raise ValueError("replicates must be positive")

    @property
    def base_seed(self) -> int:
        return derive_seed(self.seedText)

    def seed_for(self, replicate: int) -> int:
        if self.mode is SeedMode.FIXED:
            return self.base_seed
        return (self.base_seed ^ replicate) & MASK32

    def seeds(self) -> list[int]:
        return [self.seed_for(k) for k in range(self.replicates)]

    def to_dict(self) -> dict:
        return {"seedText": self.seedText, "mode": self.mode.value, "replicates": self.replicates}
