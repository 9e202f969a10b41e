"""
Four eviction policies on one tiny trace
========================================

A two-slot cache receives three alerts. Each policy picks a different victim.
"""

# %%
from alertcache import Alert, make_policy

first = Alert("minor-old", "Flood", "Minor", "Past", 0, 2000)
second = Alert("extreme", "Flood", "Extreme", "Immediate", 100, 400)
third = Alert("newcomer", "Storm", "Moderate", "Expected", 300, 1200)

for name in ("lru", "ttlonly", "priorityfresh", "paftinylfu"):
    cache = make_policy(name, capacity=2)
    cache.insert(first, 0)
    cache.insert(second, 100)
    cache.retrieve("minor-old", 200)  # refreshes recency for LRU
    result = cache.insert(third, 300)
    kept = [a.id for a in cache.contents(300)]
    print(f"{name:14} admitted={result.admitted!s:5} evicted={result.evicted} kept={kept}")

# %%
# LRU drops the extreme alert because it was touched least recently.
# TTLOnly drops the resident with the smallest share of its lifetime left.
# PriorityFresh keeps the extreme alert and drops the low-scoring old one.
# PAFTinyLFU refuses the newcomer: it has not been seen more often than the victim.
