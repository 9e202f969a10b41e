"""
Seeded randomness and synthetic alert streams
=============================================

Every run starts from a text seed. It is hashed to a 32-bit integer, which
drives a small generator that reproduces bit for bit on any platform.
"""

# %%
from collections import Counter

from alertcache import GeneratorParams, Rng, SeedSpec, derive_seed, is_actionable
from alertcache.scenarios import SCENARIOS, generate_alert_stream, generate_environment

seed = derive_seed("FISHDINNER")
rng = Rng(seed)
print("seed", seed, "first draws", [rng.next_u32() for _ in range(3)])

# %%
# Replicates either reuse the seed or XOR the replicate index into it.
print(SeedSpec("FISHDINNER", "perReplicate", 3).seeds())

# %%
# The environment is a grid of regions, each scaling the scenario's network
# reliability. The stream threads related alerts together.
params = GeneratorParams()
rng = Rng(seed)
regions = generate_environment(rng, params)
alerts = generate_alert_stream(rng, SCENARIOS["Urban"], params, regions)
print(len(regions), "regions,", len(alerts), "alerts,", len({a.threadKey for a in alerts}), "threads")
print("severity mix", Counter(a.severity.value for a in alerts).most_common())
print("actionable share", round(sum(map(is_actionable, alerts)) / len(alerts), 3))
print(alerts[0].to_dict())
