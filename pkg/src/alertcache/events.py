from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

ARRIVAL = "arrival"
DELIVERY_SUCCESS = "deliverySuccess"
DELIVERY_FAILURE = "deliveryFailure"
RETRY = "retry"
QUERY = "query"
HIT = "hit"
MISS = "miss"
STALE_ACCESS = "staleAccess"
EVICT = "evict"
PUSH = "push"
SUPPRESS = "suppress"

EVENT_KINDS = (
    ARRIVAL,
    DELIVERY_SUCCESS,
    DELIVERY_FAILURE,
    RETRY,
    QUERY,
    HIT,
    MISS,
    STALE_ACCESS,
    EVICT,
    PUSH,
    SUPPRESS,
)


@dataclass(frozen=True)
class SimEvent:
    time: float
    kind: str
    alertId: Optional[str] = None
    threadId: Optional[str] = None
    detail: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}")

    def to_list(self) -> list:
        return [self.time, self.kind, self.alertId, self.threadId, self.detail]

    @classmethod
    def from_list(cls, row: list) -> "SimEvent":
        return cls(*row)
