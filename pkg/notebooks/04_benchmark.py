# %% [markdown]
# # A small benchmark sweep
#
# `run_benchmark` draws each preset several times and scores four methods at
# the true k.  The full sweep is what `rdpc bench` runs; here two presets and
# three seeds keep it quick.

# %%
from rdpc.bench import run_benchmark, sensitivity_grid

res = run_benchmark(["C2", "M2"], seeds=3, master_seed=0)
print(res.matrix_csv())

# %% [markdown]
# Sensitivity of RDPC to `alpha` and `p` on one preset:

# %%
grid = sensitivity_grid(["M2"], seeds=2, alphas=(0.05, 0.2), ps=(0.1, 0.5, 1.0))
for name, alpha, p, acc in grid.sensitivity:
    print(f"{name} alpha={alpha:.2f} p={p:.1f} accuracy={acc:.3f}")
