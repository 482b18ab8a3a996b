"""
Per-feature scores and scatter matrices
=======================================

Three filter scores on a small three-class problem, next to the
between/total scatter matrices that the joint criterion is built on.
"""

import numpy as np

from gfscore import Dataset, fisher_scores, hsic_scores, laplacian_scores, scatter_matrices, top_m

rng = np.random.default_rng(0)
n = 90
y = np.repeat([1, 2, 3], n // 3)

# feature 0 separates all classes, feature 1 only class 3, the rest is noise
X = rng.normal(size=(5, n))
X[0] += 2.0 * (y - 2)
X[1] += 3.0 * (y == 3)
ds = Dataset(X, y)

for score in (fisher_scores(ds), hsic_scores(ds), laplacian_scores(ds, k_neighbors=5)):
    order = "larger" if score.larger_is_better else "smaller"
    print(f"{score.method_tag:>9} ({order} is better): {np.round(score.scores, 3)}  top-2 {top_m(score, 2)}")

sc = scatter_matrices(ds)
print("\nbetween-class scatter, rank", np.linalg.matrix_rank(sc.between, tol=1e-8))
print(np.round(sc.between, 1))
print("total scatter eigenvalues", np.round(np.linalg.eigvalsh(sc.total), 1))
