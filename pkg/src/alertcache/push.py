"""Rule-based push admission: rate limit, per-thread dedup, score threshold.

The threshold is fail-open for high-impact alerts (Extreme severity or
Immediate urgency); the rate limit and dedup window apply to every alert.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .alerts import Alert, Severity, Urgency, thread_id

WINDOW_SECONDS = 60.0

RATE_LIMITED = "rate_limited"
DUPLICATE = "duplicate"
BELOW_THRESHOLD = "below_threshold"


@dataclass(frozen=True)
class PushConfig:
    ratePerMinute: int = 0
    dedupWindow: float = 30.0
    threshold: float = 25.0

    def __post_init__(self) -> None:
        if self.ratePerMinute < 0:
            raise ValueError("ratePerMinute must be nonnegative")
        if self.dedupWindow < 0:
            raise ValueError("dedupWindow must be nonnegative")

    @property
    def enabled(self) -> bool:
        return self.ratePerMinute > 0

    @classmethod
    def enabled_defaults(cls) -> "PushConfig":
        return cls(ratePerMinute=5, dedupWindow=30.0, threshold=25.0)

    def to_dict(self) -> dict:
        return {
            "ratePerMinute": self.ratePerMinute,
            "dedupWindow": self.dedupWindow,
            "threshold": self.threshold,
            "enabled": self.enabled,
        }


@dataclass(frozen=True)
class PushDecision:
    pushed: bool
    reason: Optional[str] = None


@dataclass
class PushState:
    recentPushTimes: deque = field(default_factory=deque)
    lastPushPerThread: dict[str, float] = field(default_factory=dict)
    pushLog: list[tuple[float, str, str]] = field(default_factory=list)
    suppressionLog: list[tuple[str, str]] = field(default_factory=list)


def is_high_impact(alert: Alert) -> bool:
    return alert.severity is Severity.EXTREME or alert.urgency is Urgency.IMMEDIATE


def decide_push(
    state: PushState, cfg: PushConfig, alert: Alert, score: float, now: float
) -> PushDecision:
    """Decide and record whether ``alert`` is pushed at ``now``.

    ``score`` is the alert's base score at ``now``. The logged suppression
    reason is the first failing rule, checked in the order rate limit,
    duplicate, threshold.
    """
    recent = state.recentPushTimes
    while recent and recent[0] <= now - WINDOW_SECONDS:
        recent.popleft()
    thread = thread_id(alert)

    reason = None
    if len(recent) >= cfg.ratePerMinute:
        reason = RATE_LIMITED
    else:
        last = state.lastPushPerThread.get(thread)
        if last is not None and last > now - cfg.dedupWindow:
            reason = DUPLICATE
        elif not (score >= cfg.threshold or is_high_impact(alert)):
            reason = BELOW_THRESHOLD

    if reason is not None:
        state.suppressionLog.append((alert.id, reason))
        return PushDecision(False, reason)
    recent.append(now)
    state.lastPushPerThread[thread] = now
    state.pushLog.append((now, alert.id, thread))
    return PushDecision(True)
