"""
A pair that only works together
===============================

Features 3 and 7 share a large nuisance component ``u`` whose values
are the same in both classes. Feature 3 also carries a small class
shift, so the difference of the two features separates the classes
while each one alone looks like noise to a per-feature score.
"""

import itertools

import numpy as np

from gfscore import Dataset, center_columns, fisher_scores, select_k_features, top_m
from gfscore.solver import indicator, ridge_objective

rng = np.random.default_rng(0)
n, d = 60, 10
u1 = rng.normal(size=n // 2)
u = np.concatenate([u1, rng.permutation(u1)])
y = np.repeat([1, 2], n // 2)
sgn = np.where(y == 1, -1.0, 1.0)

X = rng.normal(size=(d, n))
X[3] = u + 0.06 * sgn + 0.01 * rng.normal(size=n)
X[7] = u + 0.01 * rng.normal(size=n)
ds = center_columns(Dataset(X, y))

gamma = 0.1
best = min(itertools.combinations(range(d), 2), key=lambda c: ridge_objective(ds, indicator(c, d), gamma))
print("best pair by exhaustive search:", best)
print("fisher top-2:                  ", top_m(fisher_scores(ds), 2).tolist())
print("GFS with k=2:                  ", select_k_features(ds, gamma, 2).tolist())

# the fisher ranks of the two partners
rank = np.argsort(-fisher_scores(ds).scores, kind="stable").tolist()
print("fisher ranks of features 3 and 7:", rank.index(3) + 1, rank.index(7) + 1)
