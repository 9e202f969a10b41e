"""Command line entry point: ``alertcache run|sweep|history|replay``.

Human-readable summaries go to stdout, CSV files to disk, diagnostics to
stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from . import experiments as ex
from .metrics import RATIO_FIELDS
from .policies import POLICY_NAMES, Weights
from .push import PushConfig
from .rng import SeedMode, SeedSpec
from .scenarios import scenario
from .simulation import SimConfig, run_simulation
from .store import RunStore, default_store_path, record_from_result

log = logging.getLogger("alertcache")

SWEEP_KINDS = {
    "baseline": ex.BatchKind.BASELINE,
    "cache": ex.BatchKind.CACHE_SWEEP,
    "network": ex.BatchKind.NETWORK_SWEEP,
    "joint": ex.BatchKind.JOINT_SWEEP,
    "extreme": ex.BatchKind.EXTREME_CORNERS,
}


class UsageError(Exception):
    pass


def _floats(text: str, flag: str, count: Optional[int] = None) -> list[float]:
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"{flag}: expected comma-separated numbers, got {text!r}") from None
    if count is not None and len(values) != count:
        raise UsageError(f"{flag}: expected {count} values, got {len(values)}")
    if not values:
        raise UsageError(f"{flag}: no values given")
    return values


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", default="Urban", help="Urban, Rural, Disaster or Perfect")
    p.add_argument("--cache-size", type=int, default=128)
    p.add_argument("--reliability", type=float, default=None, help="overrides the scenario's")
    p.add_argument("--alerts", type=int, default=400)
    p.add_argument("--duration", type=float, default=900.0)
    p.add_argument("--query-rate", type=float, default=60.0, help="queries per minute")
    p.add_argument("--seed", default="FISHDINNER")
    p.add_argument("--seed-mode", default="fixed", choices=[m.value for m in SeedMode])
    p.add_argument("--replicates", type=int, default=1)
    p.add_argument("--weights", default="4,5,5", help="wS,wU,wF")
    p.add_argument("--lambda", dest="decay", type=float, default=1 / 600)
    p.add_argument("--retry-interval", type=float, default=1.0)
    p.add_argument("--max-attempts", type=int, default=10)
    p.add_argument("--push-rate", type=int, default=0, help="pushes per minute; 0 disables")
    p.add_argument("--dedup-window", type=float, default=30.0)
    p.add_argument("--threshold", type=float, default=25.0)
    p.add_argument("--store", default=None, help="run store directory (env ALERTCACHE_STORE)")
    p.add_argument("--experiment-name", default=None)


def _base_config(args: argparse.Namespace, policy: str = "priorityfresh") -> SimConfig:
    try:
        spec = scenario(args.scenario)
    except ValueError as exc:
        raise UsageError(f"--scenario: {exc}") from None
    changes = {"alertCount": args.alerts, "durationSec": args.duration, "queryRatePerMin": args.query_rate}
    if args.reliability is not None:
        changes["baseReliability"] = args.reliability
    checks = [
        ("--cache-size", args.cache_size >= 1),
        ("--alerts", args.alerts >= 1),
        ("--duration", args.duration > 0),
        ("--query-rate", args.query_rate >= 0),
        ("--replicates", args.replicates >= 1),
        ("--max-attempts", args.max_attempts >= 1),
        ("--retry-interval", args.retry_interval >= 0),
        ("--push-rate", args.push_rate >= 0),
        ("--lambda", args.decay >= 0),
        ("--reliability", args.reliability is None or 0 <= args.reliability <= 1),
    ]
    for flag, ok in checks:
        if not ok:
            raise UsageError(f"{flag}: invalid value")
    if not args.seed:
        raise UsageError("--seed: must be nonempty")
    ws, wu, wf = _floats(args.weights, "--weights", 3)
    if min(ws, wu, wf) < 0:
        raise UsageError("--weights: weights must be nonnegative")
    if policy not in POLICY_NAMES:
        raise UsageError(f"--policy: unknown policy {policy!r}; expected one of {', '.join(POLICY_NAMES)}")
    # outage windows outside a shortened run are dropped
    spec = spec.replace(
        outageWindows=tuple(w for w in spec.outageWindows if w[1] <= args.duration), **changes
    )
    return SimConfig(
        scenario=spec,
        policyName=policy,
        weights=Weights(ws, wu, wf),
        decay=args.decay,
        cacheCapacity=args.cache_size,
        retryIntervalSec=args.retry_interval,
        maxAttempts=args.max_attempts,
        push=PushConfig(args.push_rate, args.dedup_window, args.threshold),
        seed=SeedSpec(args.seed, SeedMode(args.seed_mode), args.replicates),
    )


def _store(args: argparse.Namespace) -> RunStore:
    return RunStore(args.store or default_store_path())


def _table(rows: list[dict], columns: Sequence[str]) -> str:
    widths = {c: max(len(c), *(len(str(r[c])) for r in rows)) if rows else len(c) for c in columns}
    out = ["  ".join(c.ljust(widths[c]) for c in columns)]
    for r in rows:
        out.append("  ".join(str(r[c]).ljust(widths[c]) for c in columns))
    return "\n".join(out)


def cmd_run(args: argparse.Namespace) -> int:
    base = _base_config(args, args.policy.lower())
    store = None if args.no_store else _store(args)
    summary = []
    results = []
    for k in range(base.seed.replicates):
        result = run_simulation(base.replace(replicate=k))
        results.append(result)
        row = {"replicate": k, "seed": result.seed}
        row.update({m: f"{getattr(result.metrics, m):.4f}" for m in RATIO_FIELDS})
        if store is not None:
            rec = record_from_result(
                result, store, experimentName=args.experiment_name, keep_full=not args.config_only
            )
            row["id"] = store.log_run(rec)
            log.info("logged run %s", rec.id)
        summary.append(row)
    cols = ["replicate", "seed", *RATIO_FIELDS] + (["id"] if store is not None else [])
    print(f"policy={base.policyName} scenario={base.scenario.name} cache={base.cacheCapacity} "
          f"reliability={base.scenario.baseReliability}")
    print(_table(summary, cols))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for k, result in enumerate(results):
            (out / f"run-{base.policyName}-r{k}.json").write_text(result.to_json())
            (out / f"timeline-{base.policyName}-r{k}.csv").write_text(result.timeline_csv())
        log.info("wrote run results to %s", out)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    if args.config:
        spec = ex.BatchSpec.from_dict(json.loads(Path(args.config).read_text()))
    else:
        base = _base_config(args)
        kwargs = {
            "kind": SWEEP_KINDS[args.kind],
            "seed": base.seed,
            "base": base,
            "tieEpsilon": args.tie_epsilon,
            "experimentName": args.experiment_name,
        }
        if args.cache_sizes:
            kwargs["cacheSizes"] = tuple(int(c) for c in _floats(args.cache_sizes, "--cache-sizes"))
        if args.reliabilities:
            kwargs["reliabilities"] = tuple(_floats(args.reliabilities, "--reliabilities"))
        if args.policies:
            kwargs["policies"] = tuple(p.strip() for p in args.policies.split(",") if p.strip())
        try:
            spec = ex.BatchSpec(**kwargs)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    store = None if args.no_store else _store(args)
    jobs = args.jobs or os.cpu_count() or 1
    log.info("running %d runs (%s) with %d jobs", len(spec.configs()), spec.kind.value, jobs)
    batch = ex.run_batch(spec, store=store, jobs=jobs)
    stamp = args.stamp or time.strftime("%Y%m%d-%H%M%S")
    out_dir = Path(args.out_dir)
    path = ex.emit_csv(batch, out_dir, stamp)
    winner_paths = ex.emit_winner_csvs(batch, out_dir, stamp)
    log.info("wrote %s and %d winner matrices", path, len(winner_paths))
    print(f"{spec.kind.value}: {len(batch.rows)} runs -> {path}")
    if spec.kind is ex.BatchKind.EXTREME_CORNERS:
        for name, point in ex.EXTREME_CORNERS.items():
            parts = []
            for metric in ("deliveryRate", "cacheHitRate", "actionabilityFirstRatio"):
                cell = next(c for c in ex.winner_matrix(batch, metric) if c.gridPoint == point)
                vals = " ".join(f"{p}={v:.3f}" for p, v in cell.values.items())
                parts.append(f"  {metric}: winner={cell.winner} [{vals}]")
            print(f"{name} (cache={point[0]}, reliability={point[1]})")
            print("\n".join(parts))
    else:
        print(ex.recommendation_summary(batch))
    return 0


def cmd_history(args: argparse.Namespace) -> int:
    records = _store(args).list_runs(args.scenario, args.policy, args.experiment_name)
    rows = [
        {
            "id": r.id,
            "timestamp": r.timestamp,
            "scenario": r.scenario,
            "policy": r.policy,
            "seed": r.seed,
            "experiment": r.experimentName or "",
            "actionability": f"{r.metrics.actionabilityFirstRatio:.4f}",
            "hitRate": f"{r.metrics.cacheHitRate:.4f}",
        }
        for r in records
    ]
    if args.json:
        print(json.dumps([r.to_dict() | {"fullResults": None} for r in records], sort_keys=True))
    else:
        print(_table(rows, ["id", "timestamp", "scenario", "policy", "seed", "experiment",
                            "actionability", "hitRate"]))
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    store = _store(args)
    record = store.get(args.id)
    result = store.replay(args.id, rerun=args.rerun)
    same = result.metrics == record.metrics
    print(f"run {args.id}: metrics {'identical to' if same else 'DIFFER from'} stored record")
    for m in RATIO_FIELDS:
        print(f"  {m:24} {getattr(result.metrics, m):.6f}")
    return 0 if same else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="alertcache", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one simulation per replicate")
    _add_common(p)
    p.add_argument("--policy", default="priorityfresh", help=", ".join(POLICY_NAMES))
    p.add_argument("--out", default=None, help="directory for run JSON and timeline CSV")
    p.add_argument("--config-only", action="store_true", help="store config, not full results")
    p.add_argument("--no-store", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run a batch design and write CSVs")
    _add_common(p)
    p.add_argument("--kind", choices=sorted(SWEEP_KINDS), default="baseline")
    p.add_argument("--cache-sizes", default=None)
    p.add_argument("--reliabilities", default=None)
    p.add_argument("--policies", default=None)
    p.add_argument("--tie-epsilon", type=float, default=ex.DEFAULT_TIE_EPSILON)
    p.add_argument("--out-dir", default="data")
    p.add_argument("--stamp", default=None, help="filename stamp (default: current time)")
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default: CPU count)")
    p.add_argument("--config", default=None, help="JSON batch spec file")
    p.add_argument("--no-store", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("history", help="list stored runs")
    p.add_argument("--scenario", default=None)
    p.add_argument("--policy", default=None)
    p.add_argument("--experiment-name", default=None)
    p.add_argument("--json", action="store_true")
    p.add_argument("--store", default=None)
    p.set_defaults(func=cmd_history)

    p = sub.add_parser("replay", help="replay a stored run")
    p.add_argument("--id", required=True)
    p.add_argument("--rerun", action="store_true", help="re-execute even if full results exist")
    p.add_argument("--store", default=None)
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"alertcache: error: {exc}", file=sys.stderr)
        return 2
    except (KeyError, ValueError, RuntimeError) as exc:
        print(f"alertcache: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
