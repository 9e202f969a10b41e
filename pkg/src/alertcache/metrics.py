"""Run metrics computed from a simulation event log.

Every ratio keeps its numerator and denominator. A ratio whose denominator
is zero reports 0.0 and is listed in ``MetricsReport.zeroDenominators``.

A ten-event log with two threads (T1 holds A and B, T2 holds C):

>>> from .alerts import Alert
>>> alerts = {
...     "A": Alert("A", "Flood", "Extreme", "Past", 0, 1000, threadKey="T1"),
...     "B": Alert("B", "Flood", "Minor", "Past", 10, 1000, threadKey="T1"),
...     "C": Alert("C", "Storm", "Moderate", "Expected", 0, 1000, threadKey="T2"),
... }
>>> log = [SimEvent(0, "arrival", "A", "T1"), SimEvent(0, "deliverySuccess", "A", "T1"),
...        SimEvent(0, "arrival", "C", "T2"), SimEvent(10, "arrival", "B", "T1"),
...        SimEvent(10, "deliverySuccess", "B", "T1"), SimEvent(20, "hit", "A", "T1"),
...        SimEvent(30, "hit", "B", "T1"), SimEvent(90, "hit", "C", "T2"),
...        SimEvent(100, "miss"), SimEvent(130, "hit", "A", "T1")]
>>> delivery_rate(log), cache_hit_rate(log), stale_access_rate(log)
(Ratio(numerator=2, denominator=3), Ratio(numerator=4, denominator=5), Ratio(numerator=0, denominator=5))
>>> round(avg_freshness(log, alerts).value, 4)
0.9001
>>> actionability_first(log, alerts), timeliness_consistency(log, alerts, 60)
(Ratio(numerator=1, denominator=2), Ratio(numerator=1, denominator=2))
>>> redundancy_rate(log, 30)
Ratio(numerator=1, denominator=4)
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple

from .alerts import DEFAULT_DECAY, Alert, freshness, is_actionable
from .events import ARRIVAL, DELIVERY_SUCCESS, HIT, MISS, STALE_ACCESS, SimEvent


class Ratio(NamedTuple):
    numerator: float
    denominator: int

    @property
    def value(self) -> float:
        return self.numerator / self.denominator if self.denominator else 0.0

    @property
    def undefined(self) -> bool:
        return self.denominator == 0


@dataclass(frozen=True)
class MetricsConfig:
    timelinessWindow: float = 60.0
    redundancyWindow: float = 30.0

    def __post_init__(self) -> None:
        if self.timelinessWindow <= 0 or self.redundancyWindow <= 0:
            raise ValueError("metric windows must be positive")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _count(events: Iterable[SimEvent], kind: str) -> int:
    return sum(1 for e in events if e.kind == kind)


def _hits(events: Iterable[SimEvent]) -> list[SimEvent]:
    return [e for e in events if e.kind == HIT]


def _first_hits(events: Iterable[SimEvent]) -> dict[str, SimEvent]:
    first: dict[str, SimEvent] = {}
    for e in _hits(events):
        if e.threadId not in first or e.time < first[e.threadId].time:
            first[e.threadId] = e
    return first


def delivery_rate(events: list[SimEvent]) -> Ratio:
    return Ratio(_count(events, DELIVERY_SUCCESS), _count(events, ARRIVAL))


def cache_hit_rate(events: list[SimEvent]) -> Ratio:
    hits = _count(events, HIT)
    return Ratio(hits, hits + _count(events, MISS))


def avg_freshness(
    events: list[SimEvent], alerts: Mapping[str, Alert], decay: float = DEFAULT_DECAY
) -> Ratio:
    hits = _hits(events)
    total = sum(freshness(alerts[e.alertId], e.time, decay) for e in hits)
    return Ratio(total, len(hits))


def stale_access_rate(events: list[SimEvent]) -> Ratio:
    retrievals = _count(events, HIT) + _count(events, MISS)
    return Ratio(_count(events, STALE_ACCESS), retrievals)


def actionability_first(events: list[SimEvent], alerts: Mapping[str, Alert]) -> Ratio:
    """Share of surfaced threads whose first surfaced alert is actionable."""
    first = _first_hits(events)
    good = sum(1 for e in first.values() if is_actionable(alerts[e.alertId]))
    return Ratio(good, len(first))


def timeliness_consistency(
    events: list[SimEvent], alerts: Mapping[str, Alert], window: float = 60.0
) -> Ratio:
    """Share of surfaced threads first surfaced within ``window`` s of that alert's issue."""
    if window <= 0:
        raise ValueError("window must be positive")
    first = _first_hits(events)
    timely = sum(1 for e in first.values() if e.time - alerts[e.alertId].issuedAt <= window)
    return Ratio(timely, len(first))


def redundancy_rate(events: list[SimEvent], window: float = 30.0) -> Ratio:
    """Share of hits that repeat a thread surfaced less than ``window`` s earlier."""
    if window <= 0:
        raise ValueError("window must be positive")
    last: dict[str, float] = {}
    duplicates = 0
    hits = sorted(_hits(events), key=lambda e: e.time)
    for e in hits:
        prev = last.get(e.threadId)
        if prev is not None and e.time - prev < window:
            duplicates += 1
        last[e.threadId] = e.time
    return Ratio(duplicates, len(hits))


RATIO_FIELDS = (
    "deliveryRate",
    "cacheHitRate",
    "avgFreshness",
    "staleAccessRate",
    "actionabilityFirstRatio",
    "timelinessConsistency",
    "redundancyRate",
)

LOWER_IS_BETTER = frozenset({"staleAccessRate", "redundancyRate"})


@dataclass(frozen=True)
class MetricsReport:
    deliveryRate: float
    cacheHitRate: float
    avgFreshness: float
    staleAccessRate: float
    actionabilityFirstRatio: float
    timelinessConsistency: float
    redundancyRate: float
    arrivals: int
    delivered: int
    hits: int
    misses: int
    retrievals: int
    staleAccesses: int
    freshnessSum: float
    surfacedThreads: int
    actionableFirstThreads: int
    timelyThreads: int
    duplicateHits: int
    zeroDenominators: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["zeroDenominators"] = list(self.zeroDenominators)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "MetricsReport":
        d = dict(d)
        d["zeroDenominators"] = tuple(d.get("zeroDenominators", ()))
        return cls(**d)

    def ratios(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in RATIO_FIELDS}


def compute_metrics(
    events: list[SimEvent],
    alerts: Mapping[str, Alert],
    config: MetricsConfig = MetricsConfig(),
    decay: float = DEFAULT_DECAY,
) -> MetricsReport:
    ratios = {
        "deliveryRate": delivery_rate(events),
        "cacheHitRate": cache_hit_rate(events),
        "avgFreshness": avg_freshness(events, alerts, decay),
        "staleAccessRate": stale_access_rate(events),
        "actionabilityFirstRatio": actionability_first(events, alerts),
        "timelinessConsistency": timeliness_consistency(events, alerts, config.timelinessWindow),
        "redundancyRate": redundancy_rate(events, config.redundancyWindow),
    }
    r = ratios
    return MetricsReport(
        **{name: ratio.value for name, ratio in ratios.items()},
        arrivals=r["deliveryRate"].denominator,
        delivered=int(r["deliveryRate"].numerator),
        hits=int(r["cacheHitRate"].numerator),
        misses=r["cacheHitRate"].denominator - int(r["cacheHitRate"].numerator),
        retrievals=r["staleAccessRate"].denominator,
        staleAccesses=int(r["staleAccessRate"].numerator),
        freshnessSum=r["avgFreshness"].numerator,
        surfacedThreads=r["actionabilityFirstRatio"].denominator,
        actionableFirstThreads=int(r["actionabilityFirstRatio"].numerator),
        timelyThreads=int(r["timelinessConsistency"].numerator),
        duplicateHits=int(r["redundancyRate"].numerator),
        zeroDenominators=tuple(name for name, ratio in ratios.items() if ratio.undefined),
    )
