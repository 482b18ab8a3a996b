"""
Redundant copies
================

Feature 1 is a noisy copy of feature 0. A per-feature score ranks the
copy second, while the joint criterion prefers the weaker but
complementary feature 2.
"""

import numpy as np

from gfscore import Dataset, GfsConfig, center_columns, cutting_plane, fisher_scores, select_k_features, top_m

rng = np.random.default_rng(0)
n = 60
y = np.repeat([1, 2], n // 2)
sgn = np.where(y == 1, -1.0, 1.0)
X = np.empty((4, n))
X[0] = sgn + rng.normal(size=n)
X[1] = X[0] + 0.3 * rng.normal(size=n)
X[2] = 0.6 * sgn + rng.normal(size=n)
X[3] = rng.normal(size=n)
ds = center_columns(Dataset(X, y))

print("correlation of features 0 and 1: %.3f" % np.corrcoef(X[0], X[1])[0, 1])
print("fisher scores:", np.round(fisher_scores(ds).scores, 3), "-> top-2", top_m(fisher_scores(ds), 2).tolist())

run = cutting_plane(ds, GfsConfig(gamma=1.0, m=1))
print("m=1 constraints in the order they were added:", [e.constraint for e in run.trace.entries])
print("GFS with k=2:", select_k_features(ds, 1.0, 2).tolist())
