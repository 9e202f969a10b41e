"""Discrete-event run loop: delivery with retries, cache traffic, queries, pushes.

A run is a deterministic function of its :class:`SimConfig`. Everything that
does not depend on the cache policy (environment, alert stream, delivery
draws, query times) comes from streams keyed only on the seed, so runs that
differ only in policy, capacity or reliability see common random numbers.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

from .alerts import DEFAULT_DECAY, Alert, thread_id, urgency_code
from .events import (
    ARRIVAL,
    DELIVERY_FAILURE,
    DELIVERY_SUCCESS,
    EVICT,
    HIT,
    MISS,
    PUSH,
    QUERY,
    RETRY,
    STALE_ACCESS,
    SUPPRESS,
    SimEvent,
)
from .metrics import MetricsConfig, MetricsReport, compute_metrics
from .policies import EXPERIMENT_WEIGHTS, POLICY_NAMES, Weights, base_score, make_policy
from .push import PushConfig, PushState, decide_push
from .rng import Rng, SeedSpec
from .scenarios import (
    SCENARIOS,
    GeneratorParams,
    Region,
    ScenarioSpec,
    effective_reliability,
    generate_alert_stream,
    generate_environment,
)

# sub-stream salts
_DELIVERY_STREAM = 1
_QUERY_TIME_STREAM = 2
_SAMPLING_STREAM = 3


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


@dataclass(frozen=True)
class SimConfig:
    scenario: ScenarioSpec = SCENARIOS["Urban"]
    policyName: str = "priorityfresh"
    weights: Weights = EXPERIMENT_WEIGHTS
    decay: float = DEFAULT_DECAY
    cacheCapacity: int = 128
    retryIntervalSec: float = 1.0
    maxAttempts: int = 10
    push: PushConfig = PushConfig()
    seed: SeedSpec = SeedSpec()
    replicate: int = 0
    timelineResolutionSec: float = 5.0
    generator: GeneratorParams = field(default_factory=GeneratorParams)
    metrics: MetricsConfig = MetricsConfig()

    def __post_init__(self) -> None:
        if self.policyName.lower() not in POLICY_NAMES:
            raise ValueError(
                f"unknown policy {self.policyName!r}; expected one of {', '.join(POLICY_NAMES)}"
            )
        object.__setattr__(self, "policyName", self.policyName.lower())
        if self.cacheCapacity < 1:
            raise ValueError("cacheCapacity must be positive")
        if self.maxAttempts < 1:
            raise ValueError("maxAttempts must be at least 1")
        if self.retryIntervalSec < 0:
            raise ValueError("retryIntervalSec must be nonnegative")
        if self.decay < 0:
            raise ValueError("decay rate must be nonnegative")
        if self.timelineResolutionSec <= 0:
            raise ValueError("timelineResolutionSec must be positive")
        if not 0 <= self.replicate < self.seed.replicates:
            raise ValueError("replicate index outside the seed spec")

    @property
    def run_seed(self) -> int:
        return self.seed.seed_for(self.replicate)

    def replace(self, **changes) -> "SimConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario.to_dict(),
            "policyName": self.policyName,
            "weights": self.weights.to_dict(),
            "lambda": self.decay,
            "cacheCapacity": self.cacheCapacity,
            "retryIntervalSec": self.retryIntervalSec,
            "maxAttempts": self.maxAttempts,
            "push": self.push.to_dict(),
            "seed": self.seed.to_dict(),
            "replicate": self.replicate,
            "timelineResolutionSec": self.timelineResolutionSec,
            "generator": self.generator.to_dict(),
            "metrics": self.metrics.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        w = d["weights"]
        push = {k: v for k, v in d["push"].items() if k != "enabled"}
        return cls(
            scenario=ScenarioSpec(**d["scenario"]),
            policyName=d["policyName"],
            weights=Weights(w["wS"], w["wU"], w["wF"]),
            decay=d["lambda"],
            cacheCapacity=d["cacheCapacity"],
            retryIntervalSec=d["retryIntervalSec"],
            maxAttempts=d["maxAttempts"],
            push=PushConfig(**push),
            seed=SeedSpec(**d["seed"]),
            replicate=d["replicate"],
            timelineResolutionSec=d["timelineResolutionSec"],
            generator=GeneratorParams.from_dict(d["generator"]),
            metrics=MetricsConfig(**d["metrics"]),
        )

    def config_hash(self) -> str:
        return hashlib.sha256(canonical_json(self.to_dict()).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class TimelineSample:
    time: float
    cacheSize: int
    cumulativeHits: int
    cumulativeMisses: int
    hitRate: float


@dataclass
class RunResult:
    configHash: str
    config: dict
    seed: int
    metrics: MetricsReport
    perRegionStats: dict[str, dict[str, int]]
    timeline: list[TimelineSample]
    events: list[SimEvent]
    alerts: list[Alert]
    regions: list[Region]
    samplesCount: int
    expiredAtInsert: int
    streamHash: str

    def to_dict(self) -> dict:
        return {
            "configHash": self.configHash,
            "config": self.config,
            "seed": self.seed,
            "metrics": self.metrics.to_dict(),
            "perRegionStats": self.perRegionStats,
            "timeline": [dataclasses.astuple(s) for s in self.timeline],
            "events": [e.to_list() for e in self.events],
            "alerts": [a.to_dict() for a in self.alerts],
            "regions": [r.to_dict() for r in self.regions],
            "samplesCount": self.samplesCount,
            "expiredAtInsert": self.expiredAtInsert,
            "streamHash": self.streamHash,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunResult":
        return cls(
            configHash=d["configHash"],
            config=d["config"],
            seed=d["seed"],
            metrics=MetricsReport.from_dict(d["metrics"]),
            perRegionStats=d["perRegionStats"],
            timeline=[TimelineSample(*row) for row in d["timeline"]],
            events=[SimEvent.from_list(row) for row in d["events"]],
            alerts=[Alert.from_dict(a) for a in d["alerts"]],
            regions=[
                Region(r["id"], r["reliabilityMultiplier"], tuple(r["bounds"]), r["geokey"])
                for r in d["regions"]
            ],
            samplesCount=d["samplesCount"],
            expiredAtInsert=d["expiredAtInsert"],
            streamHash=d["streamHash"],
        )

    def to_json(self) -> str:
        return canonical_json(self.to_dict())

    def timeline_csv(self) -> str:
        lines = ["time,cacheSize,hits,misses,hitRate"]
        for s in self.timeline:
            lines.append(f"{s.time},{s.cacheSize},{s.cumulativeHits},{s.cumulativeMisses},{s.hitRate}")
        return "\n".join(lines) + "\n"

    def recompute_metrics(self) -> MetricsReport:
        cfg = SimConfig.from_dict(self.config)
        return compute_metrics(self.events, {a.id: a for a in self.alerts}, cfg.metrics, cfg.decay)


@dataclass(frozen=True)
class DeliveryOutcome:
    delivered: bool
    deliveryTime: float
    attempts: int


def attempt_delivery(
    rng: Rng,
    alert: Alert,
    region: Region,
    spec: ScenarioSpec,
    retryIntervalSec: float,
    maxAttempts: int,
    now: float,
) -> DeliveryOutcome:
    """Bernoulli delivery attempts every ``retryIntervalSec`` until the first success.

    Exactly ``maxAttempts`` uniforms are drawn whatever the outcome, so the
    stream stays aligned across reliability settings and a higher reliability
    can only make delivery earlier.
    """
    if maxAttempts < 1:
        raise ValueError("maxAttempts must be at least 1")
    draws = [rng.next_float() for _ in range(maxAttempts)]
    for k, u in enumerate(draws):
        t = now + k * retryIntervalSec
        if u < effective_reliability(spec, region, t):
            return DeliveryOutcome(True, t, k + 1)
    return DeliveryOutcome(False, now + (maxAttempts - 1) * retryIntervalSec, maxAttempts)


def sample_query(rng: Rng, residents: Sequence[Alert]) -> Optional[Alert]:
    """Urgency-weighted pick among residents; always consumes one draw."""
    u = rng.next_float()
    if not residents:
        return None
    weights = [urgency_code(a.urgency) for a in residents]
    target = u * sum(weights)
    acc = 0.0
    for alert, w in zip(residents, weights):
        acc += w
        if target < acc:
            return alert
    return residents[-1]


def query_times(rng: Rng, spec: ScenarioSpec) -> list[float]:
    """Poisson query arrivals over ``[0, durationSec)``."""
    if spec.queryRatePerMin <= 0:
        return []
    mean_gap = 60.0 / spec.queryRatePerMin
    times = []
    t = rng.next_exponential(mean_gap)
    while t < spec.durationSec:
        times.append(t)
        t += rng.next_exponential(mean_gap)
    return times


def stream_hash(alerts: Sequence[Alert]) -> str:
    payload = canonical_json([a.to_dict() for a in alerts])
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


# action ranks for ties on the clock
_ARRIVE, _RETRY, _DELIVER, _QUERY, _SAMPLE = range(5)


def run_simulation(
    config: SimConfig,
    alerts: Optional[Sequence[Alert]] = None,
    regions: Optional[Sequence[Region]] = None,
) -> RunResult:
    """Execute one run.

    ``alerts`` and ``regions`` replace the generated environment and stream
    (for scripted scenarios); alerts whose geokey matches no region are
    delivered under the first region's multiplier.
    """
    seed = config.run_seed
    root = Rng(seed)
    delivery_rng = root.spawn(_DELIVERY_STREAM)
    qtime_rng = root.spawn(_QUERY_TIME_STREAM)
    sample_rng = root.spawn(_SAMPLING_STREAM)
    spec = config.scenario

    if regions is None:
        regions = generate_environment(root, config.generator)
    regions = list(regions)
    if alerts is None:
        alerts = generate_alert_stream(root, spec, config.generator, regions)
    alerts = list(alerts)
    if len({a.id for a in alerts}) != len(alerts):
        raise ValueError("alert ids must be unique")
    by_geokey = {r.geokey: r for r in regions}

    actions: list[tuple] = []
    region_stats = {r.id: {"attempted": 0, "delivered": 0} for r in regions}
    for idx, alert in enumerate(alerts):
        region = by_geokey.get(alert.geokey, regions[0])
        outcome = attempt_delivery(
            delivery_rng, alert, region, spec, config.retryIntervalSec, config.maxAttempts,
            alert.issuedAt,
        )
        region_stats[region.id]["attempted"] += 1
        actions.append((alert.issuedAt, _ARRIVE, idx))
        for k in range(1, outcome.attempts):
            actions.append((alert.issuedAt + k * config.retryIntervalSec, _RETRY, idx))
        if outcome.delivered:
            region_stats[region.id]["delivered"] += 1
            actions.append((outcome.deliveryTime, _DELIVER, idx))
        else:
            actions.append((outcome.deliveryTime, _DELIVER, ~idx))
    for i, t in enumerate(query_times(qtime_rng, spec)):
        actions.append((t, _QUERY, i))
    n_samples = int(spec.durationSec // config.timelineResolutionSec) + 1
    for i in range(n_samples):
        actions.append((i * config.timelineResolutionSec, _SAMPLE, i))
    actions.sort(key=lambda a: (a[0], a[1], a[2] if a[2] >= 0 else ~a[2]))

    policy = make_policy(config.policyName, config.cacheCapacity, config.weights, config.decay)
    push_state = PushState()
    events: list[SimEvent] = []
    timeline: list[TimelineSample] = []
    hits = misses = expired_at_insert = 0

    def log(t, kind, alert=None, detail=None, alert_id=None):
        if alert is not None:
            events.append(SimEvent(t, kind, alert.id, thread_id(alert), detail))
        else:
            events.append(SimEvent(t, kind, alert_id, None, detail))

    def purge(t):
        for gone in policy.purge_expired(t):
            log(t, EVICT, alert_id=gone, detail="expired")

    for t, rank, ref in actions:
        purge(t)
        if rank == _ARRIVE:
            log(t, ARRIVAL, alerts[ref])
        elif rank == _RETRY:
            log(t, RETRY, alerts[ref])
        elif rank == _DELIVER and ref < 0:
            log(t, DELIVERY_FAILURE, alerts[~ref], detail="maxAttempts")
        elif rank == _DELIVER:
            alert = alerts[ref]
            log(t, DELIVERY_SUCCESS, alert)
            result = policy.insert(alert, t)
            if result.expired:
                expired_at_insert += 1
                log(t, EVICT, alert, detail="expiredOnArrival")
            elif not result.admitted:
                log(t, EVICT, alert, detail="rejected")
            elif result.evicted is not None:
                log(t, EVICT, alert_id=result.evicted, detail="capacity")
            if config.push.enabled:
                score = base_score(alert, t, config.weights, config.decay)
                decision = decide_push(push_state, config.push, alert, score, t)
                if decision.pushed:
                    log(t, PUSH, alert)
                else:
                    log(t, SUPPRESS, alert, detail=decision.reason)
        elif rank == _QUERY:
            log(t, QUERY)
            picked = sample_query(sample_rng, policy.contents(t))
            found = policy.retrieve(picked.id, t) if picked is not None else None
            if found is None:
                misses += 1
                log(t, MISS, picked)
            elif found.expiresAt < t:
                log(t, STALE_ACCESS, found)
                misses += 1
                log(t, MISS, found)
            else:
                hits += 1
                log(t, HIT, found)
        else:
            timeline.append(
                TimelineSample(t, len(policy), hits, misses, hits / max(1, hits + misses))
            )

    alert_index = {a.id: a for a in alerts}
    metrics = compute_metrics(events, alert_index, config.metrics, config.decay)
    return RunResult(
        configHash=config.config_hash(),
        config=config.to_dict(),
        seed=seed,
        metrics=metrics,
        perRegionStats=region_stats,
        timeline=timeline,
        events=events,
        alerts=alerts,
        regions=regions,
        samplesCount=len(timeline),
        expiredAtInsert=expired_at_insert,
        streamHash=stream_hash(alerts),
    )
