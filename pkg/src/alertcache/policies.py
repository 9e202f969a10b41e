"""Cache policies for alerts: LRU, TTLOnly, PriorityFresh and PAFTinyLFU.

All policies purge expired entries (``expiresAt <= now``) before every read
and write, so nothing expired is ever handed back to a caller.
"""

from __future__ import annotations

import abc
import heapq
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Optional

from .alerts import DEFAULT_DECAY, Alert, freshness, severity_code, urgency_code
from .sketch import FrequencySketch

__all__ = [
    "Weights",
    "InsertResult",
    "CachePolicy",
    "LRUPolicy",
    "TTLOnlyPolicy",
    "PriorityFreshPolicy",
    "PAFTinyLFUPolicy",
    "POLICY_NAMES",
    "base_score",
    "make_policy",
]


@dataclass(frozen=True)
class Weights:
    severity: float = 2.0
    urgency: float = 3.0
    freshness: float = 4.0

    def __post_init__(self) -> None:
        if min(self.severity, self.urgency, self.freshness) < 0:
            raise ValueError("weights must be nonnegative")

    def scaled(self, factor: float) -> "Weights":
        return Weights(self.severity * factor, self.urgency * factor, self.freshness * factor)

    def to_dict(self) -> dict:
        return {"wS": self.severity, "wU": self.urgency, "wF": self.freshness}


EXPERIMENT_WEIGHTS = Weights(4.0, 5.0, 5.0)


def base_score(
    alert: Alert, now: float, weights: Weights = Weights(), decay: float = DEFAULT_DECAY
) -> float:
    """Weighted sum of severity code, urgency code and freshness at ``now``."""
    return (
        weights.severity * severity_code(alert.severity)
        + weights.urgency * urgency_code(alert.urgency)
        + weights.freshness * freshness(alert, now, decay)
    )


@dataclass
class InsertResult:
    admitted: bool
    evicted: Optional[str] = None
    expired: bool = False
    updated: bool = False
    purged: list[str] = field(default_factory=list)


class CachePolicy(abc.ABC):
    name: str = ""

    def __init__(self, capacity: int) -> None:
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self._entries: dict[str, Alert] = {}
        self._expiry_heap: list[tuple[float, int, str]] = []
        self._seq = 0

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, alert_id: str) -> bool:
        return alert_id in self._entries

    def purge_expired(self, now: float) -> list[str]:
        purged = []
        heap = self._expiry_heap
        while heap and heap[0][0] <= now:
            _, _, alert_id = heapq.heappop(heap)
            alert = self._entries.get(alert_id)
            if alert is not None and alert.expiresAt <= now:
                self._remove(alert_id)
                purged.append(alert_id)
        return purged

    def insert(self, alert: Alert, now: float) -> InsertResult:
        purged = self.purge_expired(now)
        if alert.expiresAt <= now:
            return InsertResult(admitted=False, expired=True, purged=purged)
        self._on_offer(alert)
        if alert.id in self._entries:
            self._store(alert)
            self._touch(alert.id)
            return InsertResult(admitted=True, updated=True, purged=purged)
        evicted = None
        if len(self._entries) >= self.capacity:
            victim = self._victim(now)
            if not self._admit(alert, victim):
                return InsertResult(admitted=False, evicted=None, purged=purged)
            self._remove(victim)
            evicted = victim
        self._store(alert)
        return InsertResult(admitted=True, evicted=evicted, purged=purged)

    def retrieve(self, alert_id: str, now: float) -> Optional[Alert]:
        self.purge_expired(now)
        self._on_lookup(alert_id)
        alert = self._entries.get(alert_id)
        if alert is not None:
            self._touch(alert_id)
        return alert

    def contents(self, now: float) -> list[Alert]:
        """Live residents in insertion order."""
        self.purge_expired(now)
        return list(self._entries.values())

    def _store(self, alert: Alert) -> None:
        self._entries[alert.id] = alert
        self._seq += 1
        heapq.heappush(self._expiry_heap, (alert.expiresAt, self._seq, alert.id))

    def _remove(self, alert_id: str) -> None:
        del self._entries[alert_id]

    # hooks
    def _on_offer(self, alert: Alert) -> None:
        pass

    def _on_lookup(self, alert_id: str) -> None:
        pass

    def _touch(self, alert_id: str) -> None:
        pass

    def _admit(self, alert: Alert, victim: str) -> bool:
        return True

    @abc.abstractmethod
    def _victim(self, now: float) -> str:
        """Id of the resident to evict when full."""


class LRUPolicy(CachePolicy):
    name = "lru"

    def __init__(self, capacity: int) -> None:
        super().__init__(capacity)
        self._recency: OrderedDict[str, None] = OrderedDict()

    def _store(self, alert: Alert) -> None:
        super()._store(alert)
        self._recency[alert.id] = None
        self._recency.move_to_end(alert.id)

    def _remove(self, alert_id: str) -> None:
        super()._remove(alert_id)
        del self._recency[alert_id]

    def _touch(self, alert_id: str) -> None:
        self._recency.move_to_end(alert_id)

    def _victim(self, now: float) -> str:
        return next(iter(self._recency))


class TTLOnlyPolicy(CachePolicy):
    """Holds alerts until expiry, ignoring access recency.

    When full, drops the resident with the smallest remaining share of its
    TTL, ``(expiresAt - now) / (expiresAt - issuedAt)``.
    """

    name = "ttlonly"

    @staticmethod
    def remaining_ttl_fraction(alert: Alert, now: float) -> float:
        return (alert.expiresAt - now) / (alert.expiresAt - alert.issuedAt)

    def _victim(self, now: float) -> str:
        return min(
            self._entries.values(),
            key=lambda a: (self.remaining_ttl_fraction(a, now), a.issuedAt, a.id),
        ).id


class PriorityFreshPolicy(CachePolicy):
    """Evicts the resident with the lowest base score, recomputed at eviction time.

    Ties go to the earlier-issued alert, then the lexicographically smaller id.
    """

    name = "priorityfresh"

    def __init__(
        self, capacity: int, weights: Weights = Weights(), decay: float = DEFAULT_DECAY
    ) -> None:
        super().__init__(capacity)
        self.weights = weights
        self.decay = decay

    def score(self, alert: Alert, now: float) -> float:
        return base_score(alert, now, self.weights, self.decay)

    def _victim(self, now: float) -> str:
        return min(
            self._entries.values(), key=lambda a: (self.score(a, now), a.issuedAt, a.id)
        ).id


class PAFTinyLFUPolicy(LRUPolicy):
    """Recency order plus TinyLFU admission.

    Both insert offers and lookups are counted in the sketch. A newcomer to a
    full cache replaces the LRU victim only if its estimate is strictly larger.
    """

    name = "paftinylfu"

    def __init__(self, capacity: int) -> None:
        super().__init__(capacity)
        self.sketch = FrequencySketch(capacity)

    def _on_offer(self, alert: Alert) -> None:
        self.sketch.increment(alert.id)

    def _on_lookup(self, alert_id: str) -> None:
        self.sketch.increment(alert_id)

    def _admit(self, alert: Alert, victim: str) -> bool:
        return self.sketch.estimate(alert.id) > self.sketch.estimate(victim)


POLICY_NAMES = ("lru", "ttlonly", "priorityfresh", "paftinylfu")


def make_policy(
    name: str,
    capacity: int,
    weights: Weights = Weights(),
    decay: float = DEFAULT_DECAY,
) -> CachePolicy:
    key = name.lower()
    if key == "lru":
        return LRUPolicy(capacity)
    if key == "ttlonly":
        return TTLOnlyPolicy(capacity)
    if key == "priorityfresh":
        return PriorityFreshPolicy(capacity, weights, decay)
    if key == "paftinylfu":
        return PAFTinyLFUPolicy(capacity)
    raise ValueError(f"unknown policy {name!r}; expected one of {', '.join(POLICY_NAMES)}")
