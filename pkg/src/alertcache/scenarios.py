"""Seeded environments (reliability regions) and synthetic alert streams."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Optional

from .alerts import Alert, Severity, Urgency
from .rng import Rng

EVENT_TYPES = ("Flood", "Shelter", "Storm", "Evacuation")

DEFAULT_SEVERITY_WEIGHTS = {
    Severity.MINOR: 3.0,
    Severity.MODERATE: 4.0,
    Severity.SEVERE: 2.0,
    Severity.EXTREME: 1.0,
    Severity.UNKNOWN: 0.5,
}
DEFAULT_URGENCY_WEIGHTS = {
    Urgency.IMMEDIATE: 2.0,
    Urgency.EXPECTED: 3.0,
    Urgency.FUTURE: 2.0,
    Urgency.PAST: 1.0,
    Urgency.UNKNOWN: 0.5,
}

MULTIPLIER_RANGE = (0.7, 1.0)

_INSTRUCTIONS = {
    "Flood": "Move to higher ground. Avoid walking or driving through flood waters.",
    "Shelter": "Proceed to the nearest open shelter.",
    "Storm": "Stay indoors and away from windows.",
    "Evacuation": "Leave the area now by the posted route.",
}


@dataclass(frozen=True)
class ScenarioSpec:
    name: str = "Urban"
    baseReliability: float = 0.85
    alertCount: int = 400
    durationSec: float = 900.0
    queryRatePerMin: float = 60.0
    outageWindows: tuple[tuple[float, float], ...] = ()
    firstDeliverySlaSec: float = 60.0

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "outageWindows", tuple((float(a), float(b)) for a, b in self.outageWindows)
        )
        if not 0.0 <= self.baseReliability <= 1.0:
            raise ValueError("baseReliability must lie in [0, 1]")
        if self.alertCount < 1:
            raise ValueError("alertCount must be positive")
        if self.durationSec <= 0:
            raise ValueError("durationSec must be positive")
        if self.queryRatePerMin < 0:
            raise ValueError("queryRatePerMin must be nonnegative")
        for start, end in self.outageWindows:
            if not 0.0 <= start <= end <= self.durationSec:
                raise ValueError(f"outage window ({start}, {end}) outside the run")

    def in_outage(self, t: float) -> bool:
        return any(start <= t < end for start, end in self.outageWindows)

    def replace(self, **changes) -> "ScenarioSpec":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["outageWindows"] = [list(w) for w in self.outageWindows]
        return d


SCENARIOS = {
    "Urban": ScenarioSpec("Urban", baseReliability=0.85),
    "Perfect": ScenarioSpec("Perfect", baseReliability=1.0),
    "Rural": ScenarioSpec("Rural", baseReliability=0.6),
    "Disaster": ScenarioSpec("Disaster", baseReliability=0.3, outageWindows=((400.0, 500.0),)),
}


def scenario(name: str) -> ScenarioSpec:
    for key, spec in SCENARIOS.items():
        if key.lower() == name.lower():
            return spec
    raise ValueError(f"unknown scenario {name!r}; expected one of {', '.join(SCENARIOS)}")


@dataclass(frozen=True)
class Region:
    id: str
    reliabilityMultiplier: float
    bounds: tuple[float, float, float, float]  # lon0, lat0, lon1, lat1
    geokey: str

    def polygon(self) -> tuple[tuple[float, float], ...]:
        x0, y0, x1, y1 = self.bounds
        return ((x0, y0), (x1, y0), (x1, y1), (x0, y1))

    def to_dict(self) -> dict:
        return dataclasses.asdict(self) | {"bounds": list(self.bounds)}


def effective_reliability(spec: ScenarioSpec, region: Region, t: Optional[float] = None) -> float:
    if t is not None and spec.in_outage(t):
        return 0.0
    return min(1.0, max(0.0, spec.baseReliability * region.reliabilityMultiplier))


@dataclass(frozen=True)
class GeneratorParams:
    eventTypes: tuple[str, ...] = EVENT_TYPES
    severityWeights: dict = field(default_factory=lambda: dict(DEFAULT_SEVERITY_WEIGHTS))
    urgencyWeights: dict = field(default_factory=lambda: dict(DEFAULT_URGENCY_WEIGHTS))
    ttlRange: tuple[float, float] = (300.0, 1800.0)
    updateProbability: float = 0.35
    regionCount: int = 16

    def __post_init__(self) -> None:
        object.__setattr__(self, "eventTypes", tuple(self.eventTypes))
        # enum order, not caller order, fixes which label each draw maps to
        sev = {Severity(k): float(v) for k, v in self.severityWeights.items()}
        urg = {Urgency(k): float(v) for k, v in self.urgencyWeights.items()}
        object.__setattr__(self, "severityWeights", {s: sev[s] for s in Severity if s in sev})
        object.__setattr__(self, "urgencyWeights", {u: urg[u] for u in Urgency if u in urg})
        object.__setattr__(self, "ttlRange", tuple(float(x) for x in self.ttlRange))
        for label, weights in (("severity", self.severityWeights), ("urgency", self.urgencyWeights)):
            if any(w < 0 for w in weights.values()) or sum(weights.values()) <= 0:
                raise ValueError(f"{label} weights must be nonnegative with a positive sum")
        lo, hi = self.ttlRange
        if not 0 < lo <= hi:
            raise ValueError("ttlRange must satisfy 0 < lo <= hi")
        if not 0.0 <= self.updateProbability <= 1.0:
            raise ValueError("updateProbability must lie in [0, 1]")
        if self.regionCount < 1:
            raise ValueError("regionCount must be positive")
        if not self.eventTypes:
            raise ValueError("eventTypes must be nonempty")

    def to_dict(self) -> dict:
        return {
            "eventTypes": list(self.eventTypes),
            "severityWeights": {k.value: v for k, v in self.severityWeights.items()},
            "urgencyWeights": {k.value: v for k, v in self.urgencyWeights.items()},
            "ttlRange": list(self.ttlRange),
            "updateProbability": self.updateProbability,
            "regionCount": self.regionCount,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratorParams":
        return cls(**d)


def generate_environment(rng: Rng, params: GeneratorParams) -> list[Region]:
    """Tile the unit square into ``regionCount`` cells with random reliability multipliers.

    Cells are laid out on a ``ceil(sqrt(n))``-column grid, row by row.
    """
    n = params.regionCount
    cols = math.ceil(math.sqrt(n))
    rows = math.ceil(n / cols)
    lo, hi = MULTIPLIER_RANGE
    regions = []
    for k in range(n):
        r, c = divmod(k, cols)
        bounds = (c / cols, r / rows, (c + 1) / cols, (r + 1) / rows)
        # last row stretches to the right edge when the grid is ragged
        if r == rows - 1 and k == n - 1:
            bounds = (bounds[0], bounds[1], 1.0, bounds[3])
        mult = lo + (hi - lo) * rng.next_float()
        regions.append(Region(f"r{k:02d}", mult, bounds, f"g{r}-{c}"))
    return regions


def generate_alert_stream(
    rng: Rng, spec: ScenarioSpec, params: GeneratorParams, regions: list[Region]
) -> list[Alert]:
    """Synthesize ``spec.alertCount`` alerts in issue-time order.

    Issue times are whole seconds drawn uniformly over the run. Each alert
    either continues a uniformly chosen earlier thread (keeping its event type
    and geokey, with fresh severity and urgency) or opens a new thread.
    """
    if not regions:
        raise ValueError("at least one region is required")
    times = sorted(math.floor(rng.next_float() * spec.durationSec) for _ in range(spec.alertCount))
    sev_labels = list(params.severityWeights)
    sev_weights = [params.severityWeights[s] for s in sev_labels]
    urg_labels = list(params.urgencyWeights)
    urg_weights = [params.urgencyWeights[u] for u in urg_labels]
    ttl_lo, ttl_hi = params.ttlRange

    threads: list[tuple[str, str, Region]] = []
    alerts = []
    for i, issued in enumerate(times):
        joins = rng.next_float() < params.updateProbability
        if joins and threads:
            thread_key, event_type, region = threads[rng.next_index(len(threads))]
        else:
            thread_key = f"t{len(threads):04d}"
            event_type = params.eventTypes[rng.next_index(len(params.eventTypes))]
            region = regions[rng.next_index(len(regions))]
            threads.append((thread_key, event_type, region))
        severity = sev_labels[rng.next_choice(sev_weights)]
        urgency = urg_labels[rng.next_choice(urg_weights)]
        ttl = ttl_lo + (ttl_hi - ttl_lo) * rng.next_float()
        expires = issued + max(ttl_lo, min(ttl_hi, math.floor(ttl)))
        headline = f"{severity.value} {event_type} alert"
        instruction = _INSTRUCTIONS.get(event_type)
        alerts.append(
            Alert(
                id=f"a{i:05d}",
                eventType=event_type,
                severity=severity,
                urgency=urgency,
                issuedAt=issued,
                expiresAt=expires,
                headline=headline,
                instruction=instruction,
                sizeBytes=len(headline) + len(instruction or ""),
                geokey=region.geokey,
                polygon=region.polygon(),
                threadKey=thread_key,
            )
        )
    return alerts
