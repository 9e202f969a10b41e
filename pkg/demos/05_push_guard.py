"""
Push notifications under a guard
================================

Pushes are rate limited, deduplicated per thread, and gated on score. The
score gate never blocks Extreme or Immediate alerts.
"""

# %%
from alertcache import Alert, PushConfig, PushState, base_score, decide_push
from alertcache.policies import EXPERIMENT_WEIGHTS

cfg = PushConfig(ratePerMinute=2, dedupWindow=30, threshold=25)
state = PushState()
stream = [
    Alert("a1", "Flood", "Severe", "Expected", 0, 900, threadKey="river"),
    Alert("a2", "Flood", "Severe", "Expected", 10, 900, threadKey="river"),
    Alert("a3", "Storm", "Minor", "Future", 15, 900, threadKey="wind"),
    Alert("a4", "Evacuation", "Extreme", "Past", 20, 900, threadKey="levee"),
    Alert("a5", "Storm", "Extreme", "Immediate", 25, 900, threadKey="tornado"),
]
for a in stream:
    score = base_score(a, a.issuedAt, EXPERIMENT_WEIGHTS)
    d = decide_push(state, cfg, a, score, a.issuedAt)
    print(f"{a.id} score={score:5.1f} pushed={d.pushed!s:5} reason={d.reason}")

# %%
# a2 repeats the river thread inside the dedup window. a4 scores below the
# threshold yet is pushed (fail-open). a5 is refused only because two pushes
# already happened in the last minute.
