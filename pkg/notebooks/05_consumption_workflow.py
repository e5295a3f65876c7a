# %% [markdown]
# # Monthly consumption workflow
#
# The real utility data is confidential, so a seeded stand-in panel with the
# same segment sizes is used: 1,200 users over 36 months, 26 of them all zero.

# %%
import numpy as np

from rdpc import agglomerate, cut, make_consumption_standin, outlier_split, pairwise_matrix, profile
from rdpc.application import profile_csv, read_csv_text

panel = read_csv_text(make_consumption_standin(seed=0).to_csv())
print(len(panel), "users kept,", len(panel.dropped), "all-zero rows dropped")

# %% [markdown]
# Peel off the high-usage users with repeated two-way splits.  The log
# records the cluster means compared at each round.

# %%
regular, high, log = outlier_split(panel)
for step in log:
    print(step)
print(f"high usage: {len(high)} ({len(high) / len(panel):.1%})")

# %%
D = pairwise_matrix(regular.usage, "rdpc", alpha=0.2, p=0.1)
labels = cut(agglomerate(D), 7)
print("cluster sizes:", np.bincount(labels)[1:])

# %%
profiles = profile(regular, labels)
for pr in profiles:
    print(pr.cluster, pr.size, np.round(pr.yearly_total), pr.trend)

# %%
print(profile_csv(profiles).splitlines()[0])
