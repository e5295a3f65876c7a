# %% [markdown]
# # Comparing dissimilarities on two small series
#
# RankDiff looks only at the largest gaps between two series, the Pearson
# dissimilarity only at their shape.  RDPC mixes the two with a weight `alpha`.

# %%
import numpy as np

from rdpc import dtw, euclidean, pearson_dissimilarity, rank_diff, rdpc

x = np.array([1.0, -1.3, -0.7])
y = np.array([-0.9, -0.3, -1.0])

print("|x - y| sorted:", np.sort(np.abs(x - y))[::-1])
print("RankDiff, top third:", rank_diff(x, y, p=1 / 3))
print("RankDiff, all ranks:", rank_diff(x, y, p=1.0))
print("Pearson dissimilarity:", round(pearson_dissimilarity(x, y), 6))

# %% [markdown]
# Sweeping `alpha` moves linearly from one end to the other.

# %%
for alpha in (0.0, 0.2, 0.5, 1.0):
    print(f"alpha={alpha:.1f}  d={rdpc(x, y, alpha=alpha, p=1 / 3):.4f}")

# %% [markdown]
# Scaling a series leaves its correlation untouched, so at `alpha=0` two
# different series can sit at distance zero.  Any positive `alpha` separates them.

# %%
a, b = np.array([1.0, 2.0]), np.array([2.0, 4.0])
print(rdpc(a, b, alpha=0.0), rdpc(a, b, alpha=0.2, p=1.0))

# %% [markdown]
# The weight scheme decides how much each of the top `r` gaps counts.

# %%
u, v = np.zeros(5), np.array([5.0, 4.0, 3.0, 2.0, 1.0])
for scheme in ("uniform", "increasing", "decreasing"):
    print(scheme, rank_diff(u, v, p=0.6, weights=scheme))

# %% [markdown]
# Baselines for reference: DTW lets the time axis stretch, Euclidean does not.

# %%
s, t = [1, 2, 3], [1, 2, 2, 3]
print("dtw:", dtw(s, t), " euclidean (first three):", euclidean(s, t[:3]))
