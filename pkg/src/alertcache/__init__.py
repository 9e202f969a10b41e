"""Seeded simulation testbed for caching emergency alerts on a device.

Four cache policies (LRU, TTLOnly, PriorityFresh, PAFTinyLFU), a push
admission guard, a synthetic alert generator, human-centred delivery metrics
and a batch harness for cache-size / network-reliability sweeps.
"""

from .alerts import (
    Alert,
    Severity,
    Shelter,
    ShelterStatus,
    Urgency,
    freshness,
    is_actionable,
    severity_code,
    thread_id,
    urgency_code,
)
from .experiments import BatchKind, BatchSpec, extreme_corners, run_batch, winner_matrix
from .metrics import MetricsConfig, MetricsReport, compute_metrics
from .policies import (
    EXPERIMENT_WEIGHTS,
    POLICY_NAMES,
    CachePolicy,
    LRUPolicy,
    PAFTinyLFUPolicy,
    PriorityFreshPolicy,
    TTLOnlyPolicy,
    Weights,
    base_score,
    make_policy,
)
from .push import PushConfig, PushState, decide_push
from .rng import Rng, SeedMode, SeedSpec, derive_seed
from .scenarios import SCENARIOS, GeneratorParams, ScenarioSpec
from .simulation import RunResult, SimConfig, run_simulation
from .store import RunRecord, RunStore, record_from_result

__version__ = "0.1.0"
