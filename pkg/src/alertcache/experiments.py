"""Batch experiments over policies, cache sizes and network reliabilities.

All runs at a grid point share one seed per replicate, so every policy sees
the same alert stream, delivery draws and query times.
"""

from __future__ import annotations

import csv
import dataclasses
import enum
import io
import itertools
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .metrics import LOWER_IS_BETTER, RATIO_FIELDS, MetricsReport
from .policies import POLICY_NAMES
from .rng import SeedSpec
from .simulation import RunResult, SimConfig, run_simulation

ANY = "ANY"
DEFAULT_CACHE_SIZES = (32, 64, 128, 256, 512, 1024)
DEFAULT_RELIABILITIES = (0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.85, 0.9, 1.0)
DEFAULT_TIE_EPSILON = 0.005

EXTREME_CORNERS = {
    "best": (1024, 1.0),
    "goodDevicePoorNetwork": (1024, 0.3),
    "budgetDeviceGoodNetwork": (32, 0.85),
    "worst": (32, 0.3),
}


class BatchKind(str, enum.Enum):
    BASELINE = "baseline"
    CACHE_SWEEP = "cacheSweep"
    NETWORK_SWEEP = "networkSweep"
    JOINT_SWEEP = "jointSweep"
    EXTREME_CORNERS = "extremeCorners"


CSV_PREFIX = {
    BatchKind.BASELINE: "baseline-comparison",
    BatchKind.CACHE_SWEEP: "device-comparison",
    BatchKind.NETWORK_SWEEP: "network-comparison",
    BatchKind.JOINT_SWEEP: "combined-comparison",
    BatchKind.EXTREME_CORNERS: "extreme-comparison",
}

CSV_COLUMNS = ["policy", "cacheSize", "reliability", "seed", "replicate"] + [
    f.name for f in dataclasses.fields(MetricsReport)
]


class BatchError(RuntimeError):
    pass


@dataclass(frozen=True)
class BatchSpec:
    kind: BatchKind = BatchKind.BASELINE
    cacheSizes: tuple[int, ...] = DEFAULT_CACHE_SIZES
    reliabilities: tuple[float, ...] = DEFAULT_RELIABILITIES
    policies: tuple[str, ...] = POLICY_NAMES
    seed: SeedSpec = SeedSpec()
    base: SimConfig = field(default_factory=SimConfig)
    tieEpsilon: float = DEFAULT_TIE_EPSILON
    experimentName: Optional[str] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", BatchKind(self.kind))
        object.__setattr__(self, "cacheSizes", tuple(int(c) for c in self.cacheSizes))
        object.__setattr__(self, "reliabilities", tuple(float(r) for r in self.reliabilities))
        object.__setattr__(self, "policies", tuple(p.lower() for p in self.policies))
        unknown = [p for p in self.policies if p not in POLICY_NAMES]
        if unknown:
            raise ValueError(f"unknown policies: {', '.join(unknown)}")
        if not self.policies:
            raise ValueError("at least one policy is required")
        if any(c < 1 for c in self.cacheSizes):
            raise ValueError("cache sizes must be positive")
        if any(not 0 <= r <= 1 for r in self.reliabilities):
            raise ValueError("reliabilities must lie in [0, 1]")
        if self.tieEpsilon < 0:
            raise ValueError("tieEpsilon must be nonnegative")

    def grid(self) -> list[tuple[int, float]]:
        base_cap = self.base.cacheCapacity
        base_rel = self.base.scenario.baseReliability
        if self.kind is BatchKind.BASELINE:
            return [(base_cap, base_rel)]
        if self.kind is BatchKind.CACHE_SWEEP:
            return [(c, base_rel) for c in self.cacheSizes]
        if self.kind is BatchKind.NETWORK_SWEEP:
            return [(base_cap, r) for r in self.reliabilities]
        if self.kind is BatchKind.JOINT_SWEEP:
            return list(itertools.product(self.cacheSizes, self.reliabilities))
        return list(EXTREME_CORNERS.values())

    def configs(self) -> list[SimConfig]:
        out = []
        for (cap, rel), k, policy in itertools.product(
            self.grid(), range(self.seed.replicates), self.policies
        ):
            out.append(
                self.base.replace(
                    policyName=policy,
                    cacheCapacity=cap,
                    scenario=self.base.scenario.replace(baseReliability=rel),
                    seed=self.seed,
                    replicate=k,
                )
            )
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "BatchSpec":
        d = dict(d)
        if "seed" in d:
            d["seed"] = SeedSpec(**d["seed"])
        if "base" in d:
            d["base"] = SimConfig.from_dict(d["base"])
        for key in ("cacheSizes", "reliabilities", "policies"):
            if key in d:
                d[key] = tuple(d[key])
        return cls(**d)


@dataclass(frozen=True)
class BatchRow:
    policy: str
    cacheSize: int
    reliability: float
    seed: int
    replicate: int
    metrics: MetricsReport
    streamHash: str
    configHash: str
    config: dict
    timelineFinalSize: int

    def csv_values(self) -> list:
        m = self.metrics.to_dict()
        m["zeroDenominators"] = ";".join(m["zeroDenominators"])
        return [self.policy, self.cacheSize, self.reliability, self.seed, self.replicate] + [
            m[c] for c in CSV_COLUMNS[5:]
        ]


@dataclass
class BatchResult:
    spec: BatchSpec
    rows: list[BatchRow]
    results: Optional[list[RunResult]] = None

    def sorted_rows(self) -> list[BatchRow]:
        order = {p: i for i, p in enumerate(POLICY_NAMES)}
        return sorted(
            self.rows, key=lambda r: (r.cacheSize, r.reliability, r.replicate, order[r.policy])
        )

    def values(self, metric: str) -> dict[tuple[int, float], dict[str, list[float]]]:
        """``{grid point: {policy: [metric per replicate]}}``."""
        out: dict[tuple[int, float], dict[str, list[float]]] = {}
        for r in self.sorted_rows():
            out.setdefault((r.cacheSize, r.reliability), {}).setdefault(r.policy, []).append(
                getattr(r.metrics, metric)
            )
        return out


def _row(config: SimConfig, result: RunResult) -> BatchRow:
    return BatchRow(
        policy=config.policyName,
        cacheSize=config.cacheCapacity,
        reliability=config.scenario.baseReliability,
        seed=result.seed,
        replicate=config.replicate,
        metrics=result.metrics,
        streamHash=result.streamHash,
        configHash=result.configHash,
        config=result.config,
        timelineFinalSize=result.timeline[-1].cacheSize if result.timeline else 0,
    )


def _execute(config: SimConfig) -> RunResult:
    try:
        return run_simulation(config)
    except Exception as exc:
        raise BatchError(
            f"run failed for config {json.dumps(config.to_dict(), sort_keys=True)}: {exc}"
        ) from exc


def run_batch(
    spec: BatchSpec,
    store=None,
    jobs: int = 1,
    keep_results: bool = False,
    timestamp: Optional[int] = None,
) -> BatchResult:
    """Run every (grid point, replicate, policy) combination of ``spec``.

    With a :class:`~alertcache.store.RunStore`, each run is logged as a
    config-only record (replayable by re-execution). Row order is the config
    order regardless of ``jobs``.
    """
    configs = spec.configs()
    if jobs > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_execute, configs, chunksize=max(1, len(configs) // (4 * jobs))))
    else:
        results = [_execute(c) for c in configs]
    rows = [_row(c, r) for c, r in zip(configs, results)]
    if store is not None:
        from .store import record_from_result

        for c, r in zip(configs, results):
            store.log_run(
                record_from_result(
                    r, store, timestamp=timestamp, experimentName=spec.experimentName or spec.kind.value
                )
            )
    return BatchResult(spec, rows, results if keep_results else None)


@dataclass(frozen=True)
class WinnerCell:
    metric: str
    gridPoint: tuple[int, float]
    winner: str
    margin: float
    values: dict[str, float]


def winner_cell(
    metric: str, point: tuple[int, float], values: dict[str, float], tie_epsilon: float
) -> WinnerCell:
    policies = list(values)
    arr = np.array([values[p] for p in policies], dtype=float)
    spread = float(arr.max() - arr.min())
    if spread <= tie_epsilon:
        return WinnerCell(metric, point, ANY, spread, values)
    best = int(arr.argmin() if metric in LOWER_IS_BETTER else arr.argmax())
    return WinnerCell(metric, point, policies[best], spread, values)


def winner_matrix(
    batch: BatchResult, metric: str, tie_epsilon: Optional[float] = None
) -> list[WinnerCell]:
    """Per grid point winner of ``metric`` (replicate means), or ANY on a tie.

    A cell is ANY when the spread across policies is within ``tie_epsilon``;
    otherwise the best policy wins (lowest for stale/redundancy, else highest).
    """
    if metric not in RATIO_FIELDS:
        raise ValueError(f"unknown metric {metric!r}")
    eps = batch.spec.tieEpsilon if tie_epsilon is None else tie_epsilon
    table = batch.values(metric)
    cells = []
    for point in batch.spec.grid():
        per_policy = table.get(point, {})
        missing = [p for p in batch.spec.policies if p not in per_policy]
        if missing:
            raise ValueError(f"grid point {point} lacks results for {', '.join(missing)}")
        means = {p: float(np.mean(per_policy[p])) for p in batch.spec.policies}
        cells.append(winner_cell(metric, point, means, eps))
    return cells


def extreme_corners(
    seed: SeedSpec = SeedSpec(),
    base: Optional[SimConfig] = None,
    store=None,
    jobs: int = 1,
    tie_epsilon: float = DEFAULT_TIE_EPSILON,
) -> tuple[BatchResult, dict[str, dict]]:
    """Run the four device/network corners and summarise them.

    Returns the batch and ``{corner: {"point", "means", "winners"}}`` covering
    delivery rate, hit rate and actionability-first.
    """
    spec = BatchSpec(
        kind=BatchKind.EXTREME_CORNERS,
        seed=seed,
        base=base or SimConfig(),
        tieEpsilon=tie_epsilon,
    )
    batch = run_batch(spec, store=store, jobs=jobs)
    metrics = ("deliveryRate", "cacheHitRate", "actionabilityFirstRatio")
    cells = {m: {c.gridPoint: c for c in winner_matrix(batch, m)} for m in metrics}
    summary = {}
    for name, point in EXTREME_CORNERS.items():
        summary[name] = {
            "point": point,
            "means": {m: cells[m][point].values for m in metrics},
            "winners": {m: cells[m][point].winner for m in metrics},
        }
    return batch, summary


def rows_csv(batch: BatchResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in batch.sorted_rows():
        writer.writerow(row.csv_values())
    return buf.getvalue()


def winners_csv(cells: Sequence[WinnerCell], policies: Iterable[str]) -> str:
    policies = list(policies)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["metric", "cacheSize", "reliability", "winner", "margin"] + policies)
    for c in cells:
        writer.writerow(
            [c.metric, c.gridPoint[0], c.gridPoint[1], c.winner, c.margin]
            + [c.values[p] for p in policies]
        )
    return buf.getvalue()


def emit_csv(batch: BatchResult, out_dir: str | os.PathLike, stamp: str) -> Path:
    """Write the per-run rows as ``<prefix>-<stamp>.csv``; returns the path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{CSV_PREFIX[batch.spec.kind]}-{stamp}.csv"
    path.write_text(rows_csv(batch))
    return path


def emit_winner_csvs(
    batch: BatchResult, out_dir: str | os.PathLike, stamp: str, tie_epsilon: Optional[float] = None
) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for metric in RATIO_FIELDS:
        cells = winner_matrix(batch, metric, tie_epsilon)
        path = out / f"winners-{CSV_PREFIX[batch.spec.kind]}-{metric}-{stamp}.csv"
        path.write_text(winners_csv(cells, batch.spec.policies))
        paths.append(path)
    return paths


def _zone(point: tuple[int, float]) -> str:
    cap, rel = point
    device = "high cache" if cap >= 512 else "low cache"
    net = "good net" if rel >= 0.8 else "poor net"
    return f"{device} + {net}"


def recommendation_summary(batch: BatchResult, tie_epsilon: Optional[float] = None) -> str:
    """Most frequent winner per metric in each device x network zone of the grid."""
    lines = []
    for metric in RATIO_FIELDS:
        cells = winner_matrix(batch, metric, tie_epsilon)
        zones: dict[str, dict[str, int]] = {}
        for c in cells:
            tally = zones.setdefault(_zone(c.gridPoint), {})
            tally[c.winner] = tally.get(c.winner, 0) + 1
        parts = []
        for zone in sorted(zones):
            tally = zones[zone]
            top = max(sorted(tally), key=lambda w: tally[w])
            parts.append(f"{zone}: {top} ({tally[top]}/{sum(tally.values())})")
        lines.append(f"{metric:24} " + "; ".join(parts))
    return "\n".join(lines)
