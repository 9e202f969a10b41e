"""
One simulation run and its metrics
==================================

A run delivers alerts over a lossy network with retries, caches them, and
answers urgency-weighted queries against the cache.
"""

# %%
from alertcache import SimConfig, run_simulation
from alertcache.scenarios import SCENARIOS

result = run_simulation(SimConfig(policyName="priorityfresh", cacheCapacity=32,
                                  scenario=SCENARIOS["Rural"]))
for name, value in result.metrics.ratios().items():
    print(f"{name:24} {value:.4f}")

# %%
# Counts back every ratio, so nothing is hidden behind a rounded percentage.
m = result.metrics
print(f"hits {m.hits} / retrievals {m.retrievals}; threads surfaced {m.surfacedThreads}")

# %%
# The timeline samples cache occupancy and running hit rate every few seconds.
print(result.timeline_csv().splitlines()[:4])
print("events logged:", len(result.events), "first:", result.events[0])
