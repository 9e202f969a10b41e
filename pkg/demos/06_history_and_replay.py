"""
Run history and replay
======================

Runs can be logged to an append-only store. A config-only record is small and
can be re-executed later to recover the full result.
"""

# %%
import tempfile

from alertcache import RunStore, SimConfig, record_from_result, run_simulation

store = RunStore(tempfile.mkdtemp())
for policy in ("lru", "priorityfresh"):
    result = run_simulation(SimConfig(policyName=policy))
    store.log_run(record_from_result(result, store, experimentName="demo"))

for rec in store.list_runs(experimentName="demo"):
    print(rec.id, rec.policy, f"actionability={rec.metrics.actionabilityFirstRatio:.3f}")

# %%
rec = store.list_runs(policy="priorityfresh")[0]
again = store.replay(rec.id)
print("replayed metrics identical:", again.metrics == rec.metrics)
