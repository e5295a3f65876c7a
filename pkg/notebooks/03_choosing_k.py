# %% [markdown]
# # Choosing the number of clusters
#
# The within-cluster score is evaluated on cuts of one dendrogram and the
# elbow detector reports up to three candidate values of k.

# %%
from rdpc import detect_elbows, elbow_curve, generate, preset

ds = generate(preset("M3", seed=1))
curve = elbow_curve(ds.series, "hierarchical", "rdpc", (1, 15))
for k, score in zip(curve.ks, curve.scores):
    print(f"k={k:2d}  {score:9.2f}  " + "#" * int(40 * score / curve.scores[0]))

# %%
print("elbows:", detect_elbows(curve), " true k:", ds.spec.k)

# %% [markdown]
# The same curve with K-means and its within-cluster sum of squares:

# %%
km_curve = elbow_curve(ds.series, "kmeans", k_range=(1, 15), seed=1)
print("kmeans elbows:", detect_elbows(km_curve))
print(km_curve.to_csv().splitlines()[:4])
