"""Append-only JSON-lines run history.

A store is a directory holding ``runs.jsonl`` (one canonical JSON record per
line) and ``meta.json`` (format version). Writers append under an exclusive
``flock``; readers rebuild the id index on open.
"""

from __future__ import annotations

import fcntl
import json
import os
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .metrics import MetricsReport
from .simulation import RunResult, SimConfig, canonical_json, run_simulation

FORMAT_VERSION = 1
STORE_ENV = "ALERTCACHE_STORE"
DEFAULT_STORE = ".alertcache-runs"


class DuplicateRunError(KeyError):
    pass


class UnknownRunError(KeyError):
    pass


class ReplayError(RuntimeError):
    pass


@dataclass(frozen=True)
class RunRecord:
    id: str
    scenario: str
    policy: str
    seed: int
    seedText: str
    timestamp: int
    metrics: MetricsReport
    samplesCount: int
    config: Optional[dict] = None
    experimentName: Optional[str] = None
    notes: Optional[str] = None
    fullResults: Optional[RunResult] = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "scenario": self.scenario,
            "policy": self.policy,
            "seed": self.seed,
            "seedText": self.seedText,
            "timestamp": self.timestamp,
            "metrics": self.metrics.to_dict(),
            "samplesCount": self.samplesCount,
            "config": self.config,
            "experimentName": self.experimentName,
            "notes": self.notes,
            "fullResults": self.fullResults.to_dict() if self.fullResults else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        d = dict(d)
        d["metrics"] = MetricsReport.from_dict(d["metrics"])
        if d.get("fullResults") is not None:
            d["fullResults"] = RunResult.from_dict(d["fullResults"])
        return cls(**d)

    def to_json(self) -> str:
        return canonical_json(self.to_dict())


def default_store_path() -> Path:
    return Path(os.environ.get(STORE_ENV, DEFAULT_STORE))


class RunStore:
    def __init__(self, path: str | os.PathLike) -> None:
        self.path = Path(path)
        self.path.mkdir(parents=True, exist_ok=True)
        self.file = self.path / "runs.jsonl"
        meta = self.path / "meta.json"
        if meta.exists():
            version = json.loads(meta.read_text()).get("version")
            if version != FORMAT_VERSION:
                raise ValueError(f"unsupported run store version {version!r}")
        else:
            meta.write_text(json.dumps({"version": FORMAT_VERSION}) + "\n")
        self.file.touch()
        self._records: list[RunRecord] = []
        self._index: dict[str, int] = {}
        self._offset = 0
        self._refresh()

    def _refresh(self) -> None:
        with open(self.file, "rb") as fh:
            fh.seek(self._offset)
            for raw in fh:
                if not raw.endswith(b"\n"):
                    break  # partial line from a concurrent writer
                self._offset += len(raw)
                if raw.strip():
                    rec = RunRecord.from_dict(json.loads(raw))
                    self._index[rec.id] = len(self._records)
                    self._records.append(rec)

    def __len__(self) -> int:
        self._refresh()
        return len(self._records)

    def __contains__(self, run_id: str) -> bool:
        self._refresh()
        return run_id in self._index

    def unique_id(self, base: str) -> str:
        self._refresh()
        candidate, n = base, 1
        while candidate in self._index:
            n += 1
            candidate = f"{base}-{n}"
        return candidate

    def log_run(self, record: RunRecord) -> str:
        line = record.to_json() + "\n"
        with open(self.file, "a", encoding="utf-8") as fh:
            fcntl.flock(fh, fcntl.LOCK_EX)
            try:
                self._refresh()
                if record.id in self._index:
                    raise DuplicateRunError(record.id)
                fh.write(line)
                fh.flush()
                os.fsync(fh.fileno())
            finally:
                fcntl.flock(fh, fcntl.LOCK_UN)
        self._refresh()
        return record.id

    def get(self, run_id: str) -> RunRecord:
        self._refresh()
        try:
            return self._records[self._index[run_id]]
        except KeyError:
            raise UnknownRunError(run_id) from None

    def list_runs(
        self,
        scenario: Optional[str] = None,
        policy: Optional[str] = None,
        experimentName: Optional[str] = None,
    ) -> list[RunRecord]:
        self._refresh()
        out = [
            r
            for r in self._records
            if (scenario is None or r.scenario == scenario)
            and (policy is None or r.policy == policy)
            and (experimentName is None or r.experimentName == experimentName)
        ]
        return sorted(out, key=lambda r: r.timestamp)

    def replay(self, run_id: str, rerun: bool = False) -> RunResult:
        """Return the stored result, or re-execute the stored config.

        Re-execution (forced by ``rerun`` or needed for config-only records)
        must reproduce the stored metrics exactly.
        """
        rec = self.get(run_id)
        if rec.fullResults is not None and not rerun:
            return rec.fullResults
        if rec.config is None:
            raise ReplayError(f"run {run_id} has neither full results nor a config")
        result = run_simulation(SimConfig.from_dict(rec.config))
        if result.metrics != rec.metrics:
            raise ReplayError(f"run {run_id}: re-executed metrics differ from the stored record")
        return result


def record_from_result(
    result: RunResult,
    store: Optional[RunStore] = None,
    timestamp: Optional[int] = None,
    experimentName: Optional[str] = None,
    notes: Optional[str] = None,
    keep_full: bool = False,
    run_id: Optional[str] = None,
) -> RunRecord:
    ts = int(time.time()) if timestamp is None else int(timestamp)
    cfg = result.config
    if run_id is None:
        run_id = f"{ts}-{cfg['policyName']}-{result.configHash}"
        if store is not None:
            run_id = store.unique_id(run_id)
    return RunRecord(
        id=run_id,
        scenario=cfg["scenario"]["name"],
        policy=cfg["policyName"],
        seed=result.seed,
        seedText=cfg["seed"]["seedText"],
        timestamp=ts,
        metrics=result.metrics,
        samplesCount=result.samplesCount,
        config=cfg,
        experimentName=experimentName,
        notes=notes,
        fullResults=result if keep_full else None,
    )
