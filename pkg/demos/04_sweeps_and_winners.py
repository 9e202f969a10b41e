"""
Sweeps and winner matrices
==========================

Policies at each grid point share one seed, so their differences are paired.
A cell is ANY when every policy lands within a small tolerance.
"""

# %%
from alertcache import BatchSpec, run_batch, winner_matrix
from alertcache.experiments import recommendation_summary, rows_csv
from alertcache.rng import SeedSpec

spec = BatchSpec(kind="jointSweep", cacheSizes=(32, 512), reliabilities=(0.3, 0.85),
                 seed=SeedSpec("FISHDINNER", "perReplicate", 2))
batch = run_batch(spec)
print(len(batch.rows), "runs")

# %%
for cell in winner_matrix(batch, "actionabilityFirstRatio"):
    vals = ", ".join(f"{p}={v:.3f}" for p, v in cell.values.items())
    print(cell.gridPoint, cell.winner, f"margin={cell.margin:.3f}", vals)

# %%
print(recommendation_summary(batch))
print(rows_csv(batch).splitlines()[0])
