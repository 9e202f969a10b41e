"""Alert and shelter records, ordinal encodings and the freshness decay."""

from __future__ import annotations

import dataclasses
import enum
import json
import math
from dataclasses import dataclass
from typing import Any, Iterable, Iterator, Optional

DEFAULT_DECAY = 1.0 / 600.0


class Severity(str, enum.Enum):
    MINOR = "Minor"
    MODERATE = "Moderate"
    SEVERE = "Severe"
    EXTREME = "Extreme"
    UNKNOWN = "Unknown"


class Urgency(str, enum.Enum):
    IMMEDIATE = "Immediate"
    EXPECTED = "Expected"
    FUTURE = "Future"
    PAST = "Past"
    UNKNOWN = "Unknown"


class ShelterStatus(str, enum.Enum):
    OPEN = "open"
    FULL = "full"
    CLOSED = "closed"


SEVERITY_CODES = {
    Severity.MINOR: 1.0,
    Severity.MODERATE: 2.0,
    Severity.SEVERE: 3.0,
    Severity.EXTREME: 4.0,
    Severity.UNKNOWN: 2.0,
}

URGENCY_CODES = {
    Urgency.PAST: 0.5,
    Urgency.FUTURE: 1.5,
    Urgency.EXPECTED: 2.0,
    Urgency.IMMEDIATE: 3.0,
    Urgency.UNKNOWN: 1.5,
}


def severity_code(sev: Severity | str) -> float:
    return SEVERITY_CODES[Severity(sev)]


def urgency_code(urg: Urgency | str) -> float:
    return URGENCY_CODES[Urgency(urg)]


@dataclass(frozen=True)
class Alert:
    """A CAP-subset emergency report.

    Times are seconds on the simulation clock. Generated alerts use whole
    seconds; the simulator itself runs on a continuous clock.
    """

    id: str
    eventType: str
    severity: Severity
    urgency: Urgency
    issuedAt: float
    expiresAt: float
    headline: Optional[str] = None
    instruction: Optional[str] = None
    sizeBytes: Optional[int] = None
    geokey: Optional[str] = None
    polygon: Optional[tuple[tuple[float, float], ...]] = None
    threadKey: Optional[str] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "severity", Severity(self.severity))
        object.__setattr__(self, "urgency", Urgency(self.urgency))
        if self.polygon is not None:
            object.__setattr__(
                self, "polygon", tuple((float(x), float(y)) for x, y in self.polygon)
            )
        if not self.expiresAt > self.issuedAt:
            raise ValueError(f"alert {self.id}: expiresAt must be after issuedAt")
        if self.sizeBytes is not None and self.sizeBytes < 0:
            raise ValueError(f"alert {self.id}: sizeBytes must be nonnegative")

    @property
    def thread(self) -> str:
        return thread_id(self)

    def to_dict(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        d["severity"] = self.severity.value
        d["urgency"] = self.urgency.value
        d["issuedAt"] = _timestamp(self.issuedAt)
        d["expiresAt"] = _timestamp(self.expiresAt)
        if self.polygon is not None:
            d["polygon"] = [list(p) for p in self.polygon]
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Alert":
        d = dict(d)
        if d.get("polygon") is not None:
            d["polygon"] = tuple(tuple(p) for p in d["polygon"])
        return cls(**d)


@dataclass(frozen=True)
class Shelter:
    id: str
    name: str
    coordinates: tuple[float, float]
    status: ShelterStatus
    updatedAt: int
    address: Optional[str] = None
    capacity: Optional[int] = None
    geokey: Optional[str] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "status", ShelterStatus(self.status))
        object.__setattr__(self, "coordinates", tuple(float(c) for c in self.coordinates))
        if self.capacity is not None and self.capacity < 0:
            raise ValueError(f"shelter {self.id}: capacity must be nonnegative")

    def to_dict(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        d["status"] = self.status.value
        d["coordinates"] = list(self.coordinates)
        d["updatedAt"] = int(self.updatedAt)
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Shelter":
        d = dict(d)
        d["coordinates"] = tuple(d["coordinates"])
        return cls(**d)


def _timestamp(t: float) -> int | float:
    return int(t) if float(t).is_integer() else t


def thread_id(alert: Alert) -> str:
    """Thread identity: the explicit threadKey, falling back to the alert id."""
    return alert.threadKey if alert.threadKey is not None else alert.id


def freshness(alert: Alert, now: float, decay: float = DEFAULT_DECAY) -> float:
    """Exponential freshness ``exp(-decay * age)``, in (0, 1]."""
    age = now - alert.issuedAt
    if age < 0:
        raise ValueError(
            f"freshness of {alert.id} requested at {now}, before issue time {alert.issuedAt}"
        )
    return math.exp(-decay * age)


def is_actionable(alert: Alert) -> bool:
    return alert.urgency is Urgency.IMMEDIATE or alert.severity in (
        Severity.SEVERE,
        Severity.EXTREME,
    )


def dumps_jsonl(records: Iterable[Alert | Shelter]) -> str:
    """Serialize records one JSON object per line."""
    return "".join(
        json.dumps(r.to_dict(), sort_keys=True, separators=(",", ":")) + "\n" for r in records
    )


def loads_alerts(text: str) -> Iterator[Alert]:
    for line in text.splitlines():
        if line.strip():
            yield Alert.from_dict(json.loads(line))


def loads_shelters(text: str) -> Iterator[Shelter]:
    for line in text.splitlines():
        if line.strip():
            yield Shelter.from_dict(json.loads(line))
