# %% [markdown]
# # Hierarchical clustering with RDPC vs K-means
#
# One of the mixed presets: some clusters share a level but differ in seasonal
# shape, others share a shape at different levels.

# %%
from rdpc import accuracy, agglomerate, cut, generate, kmeans, pairwise_matrix, preset

ds = generate(preset("MC1", seed=0))
print(ds.series.shape, "clusters:", ds.spec.k)

# %%
D = pairwise_matrix(ds.series, "rdpc", alpha=0.2, p=0.1)
tree = agglomerate(D, "complete")
labels = cut(tree, ds.spec.k)
print("RDPC + complete linkage:", round(accuracy(ds.labels, labels), 3))

# %%
# the last few merges carry the largest heights
for left, right, height, new in tree.merges[-4:]:
    print(f"{left:4d} + {right:4d} -> {new}  at {height:.3f}")

# %%
for measure in ("pearson", "dtw"):
    lab = cut(agglomerate(pairwise_matrix(ds.series, measure)), ds.spec.k)
    print(f"{measure:8s}", round(accuracy(ds.labels, lab), 3))

km = kmeans(ds.series, ds.spec.k, seed=0)
print("kmeans  ", round(accuracy(ds.labels, km.labels), 3), "WSS", round(km.wss, 1))

# %% [markdown]
# The dendrogram serialises to JSON for plotting elsewhere, and converts to a
# SciPy-style linkage matrix.

# %%
print(tree.to_json()[:120], "...")
print(tree.to_linkage_matrix()[-1])
