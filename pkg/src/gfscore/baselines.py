"""Per-feature filter scores and top-m ranking.

Three filters are provided: the Fisher score, the Laplacian score
(He, Cai & Niyogi, 2005) and a linear-kernel HSIC estimate. Fisher and
HSIC scores are larger-is-better, Laplacian scores smaller-is-better.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .data import Dataset, class_stats, one_hot

LARGER_IS_BETTER = {"fisher": True, "hsic": True, "laplacian": False}

# relative threshold below which a variance sum is treated as zero
_ZERO_VAR_RTOL = 1e-12


@dataclass(frozen=True)
class ScoreVector:
    scores: np.ndarray
    method_tag: str

    def __post_init__(self):
        if self.method_tag not in LARGER_IS_BETTER:
            raise ValueError(f"unknown method tag {self.method_tag!r}")
        if np.any(np.isnan(self.scores)):
            raise ValueError("scores contain NaN")

    @property
    def larger_is_better(self) -> bool:
        return LARGER_IS_BETTER[self.method_tag]


def fisher_scores(ds: Dataset) -> ScoreVector:
    """Fisher score of each feature with population variances.

    A feature with zero within-class spread but separated class means
    scores ``+inf``; a constant feature scores 0.
    """
    stats = class_stats(ds)
    n_k = stats.counts
    diff = stats.class_means - stats.overall_mean[:, None]
    between = (diff**2) @ n_k
    resid = ds.features - stats.class_means[:, ds.labels - 1]
    within = np.sum(resid**2, axis=1)  # == sum_k n_k sigma_k^2
    total = between + within
    scale = np.maximum(total, np.finfo(float).tiny)

    scores = np.zeros(ds.n_features)
    informative = total > 0
    degenerate = informative & (within <= _ZERO_VAR_RTOL * scale)
    regular = informative & ~degenerate
    scores[regular] = between[regular] / within[regular]
    scores[degenerate] = np.inf
    # between ~ 0 relative to total means the feature carries no class signal
    scores[informative & (between <= _ZERO_VAR_RTOL * scale)] = 0.0
    return ScoreVector(scores, "fisher")


def knn_heat_graph(points: np.ndarray, k_neighbors: int, bandwidth=None) -> np.ndarray:
    """Symmetric k-NN affinity matrix with heat-kernel weights.

    ``points`` holds samples in rows. ``bandwidth=None`` uses the mean
    squared pairwise distance. A vertex whose heat weights all underflow
    is joined to its nearest neighbour with weight 1.
    """
    n = points.shape[0]
    if not 1 <= k_neighbors < n:
        raise ValueError(f"k_neighbors must lie in [1, {n - 1}], got {k_neighbors}")
    sq = cdist(points, points, "sqeuclidean")
    if bandwidth is None:
        bandwidth = sq.sum() / (n * (n - 1))
    if bandwidth <= 0:
        bandwidth = 1.0
    masked = sq.copy()
    np.fill_diagonal(masked, np.inf)
    # stable sort so equal distances resolve to the lower sample index
    nbrs = np.argsort(masked, axis=1, kind="stable")[:, :k_neighbors]
    adj = np.zeros((n, n), dtype=bool)
    adj[np.repeat(np.arange(n), k_neighbors), nbrs.ravel()] = True
    adj |= adj.T
    S = np.where(adj, np.exp(-sq / bandwidth), 0.0)
    for i in np.flatnonzero(S.sum(axis=1) == 0):
        j = nbrs[i, 0]
        S[i, j] = S[j, i] = 1.0
    return S


def laplacian_scores(ds: Dataset, k_neighbors: int = 5, heat_bandwidth=None) -> ScoreVector:
    """Laplacian score of each feature (smaller is better).

    Constant features cannot be scored and receive ``+inf``.
    """
    S = knn_heat_graph(ds.features.T, k_neighbors, heat_bandwidth)
    deg = S.sum(axis=1)
    F = ds.features
    Ft = F - ((F @ deg) / deg.sum())[:, None]
    # f^T L f = f^T D f - f^T S f
    fDf = (Ft**2) @ deg
    fLf = fDf - np.einsum("ji,ik,jk->j", Ft, S, Ft)
    scores = np.full(ds.n_features, np.inf)
    ok = fDf > _ZERO_VAR_RTOL * np.maximum((F**2) @ deg, np.finfo(float).tiny)
    scores[ok] = np.maximum(fLf[ok], 0.0) / fDf[ok]
    return ScoreVector(scores, "laplacian")


def hsic_scores(ds: Dataset) -> ScoreVector:
    """Biased HSIC between each feature and the labels, linear kernels.

    ``trace(C K_j C L) / (n-1)^2`` with ``K_j`` the outer product of the
    feature row and ``L`` the label-indicator Gram matrix. It collapses
    to ``||(x - mean x) Y||^2 / (n-1)^2``.
    """
    n = ds.n_samples
    Y = one_hot(ds.labels, ds.n_classes)
    Xc = ds.features - ds.features.mean(axis=1, keepdims=True)
    return ScoreVector(np.sum((Xc @ Y) ** 2, axis=1) / (n - 1) ** 2, "hsic")


def top_m(sv: ScoreVector, m: int) -> np.ndarray:
    """Indices of the ``m`` best scores, sorted ascending.

    Ties go to the smaller feature index.
    """
    d = sv.scores.size
    if not 1 <= m <= d:
        raise ValueError(f"m must lie in [1, {d}], got {m}")
    key = -sv.scores if sv.larger_is_better else sv.scores
    order = np.argsort(key, kind="stable")
    return np.sort(order[:m])
