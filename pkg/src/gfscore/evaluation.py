"""1-NN evaluation protocol: repeated random splits and gamma tuning.

Every trial draws its own split from ``(seed, trial_index)``, fits the
standardizer and the feature selector on the training half only, and
scores a 1-nearest-neighbour classifier on the held-out half restricted
to the selected features.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .baselines import fisher_scores, hsic_scores, laplacian_scores, top_m
from .data import Dataset, DataError, apply_standardizer, fit_standardizer, split_train_test
from .solver import GfsConfig, gfs_selection_path

METHODS = ("gfs", "fisher", "laplacian", "hsic", "all")
DEFAULT_GAMMA_GRID = (50.0, 100.0, 200.0, 300.0, 400.0, 500.0)


@dataclass(frozen=True)
class MethodConfig:
    """How to select features for one method.

    For ``gfs`` give either ``gamma`` or ``gamma_grid`` (tuned by
    stratified cross-validation on the training data).
    """

    name: str
    gamma: float | None = None
    gamma_grid: tuple[float, ...] | None = None
    folds: int = 5
    k_neighbors: int = 5
    heat_bandwidth: float | None = None
    solver: GfsConfig | None = None

    def __post_init__(self):
        if self.name not in METHODS:
            raise ValueError(f"unknown method {self.name!r}; choose from {METHODS}")
        if self.name == "gfs" and (self.gamma is None) == (self.gamma_grid is None):
            raise ValueError("gfs needs exactly one of gamma / gamma_grid")
        if self.gamma_grid is not None:
            object.__setattr__(self, "gamma_grid", tuple(float(g) for g in self.gamma_grid))
            if not self.gamma_grid:
                raise ValueError("empty gamma grid")
        if self.folds < 2:
            raise ValueError("folds must be >= 2")


@dataclass
class TrialResult:
    trial_index: int
    selected_features: list[int]
    accuracy: float
    gamma_used: float | None = None
    trace: list[dict] | None = None


@dataclass
class AggregateResult:
    method: str
    mean_accuracy: float
    std_accuracy: float
    trials: list[TrialResult] = field(default_factory=list)

    @classmethod
    def from_trials(cls, method: str, trials: list[TrialResult]) -> AggregateResult:
        acc = np.array([t.accuracy for t in trials])
        # population standard deviation over trials
        return cls(method, float(acc.mean()), float(acc.std()), trials)


def knn1_predict(train: Dataset, query_points) -> np.ndarray:
    """Label of the Euclidean nearest training sample for each query column.

    Distance ties go to the training sample with the smaller index.
    """
    Q = np.asarray(query_points, dtype=float)
    if Q.ndim == 1:
        Q = Q[:, None]
    if Q.shape[0] != train.n_features:
        raise ValueError(f"query has {Q.shape[0]} features, training data has {train.n_features}")
    D = cdist(Q.T, train.features.T, "sqeuclidean")
    return train.labels[np.argmin(D, axis=1)]


def accuracy(pred, truth) -> float:
    pred, truth = np.asarray(pred), np.asarray(truth)
    if pred.shape != truth.shape:
        raise ValueError(f"length mismatch: {pred.shape} vs {truth.shape}")
    return float(np.mean(pred == truth))


def _compact_labels(ds: Dataset) -> Dataset:
    # renumber present classes to 1..c' so label-driven selectors accept folds
    present, y = np.unique(ds.labels, return_inverse=True)
    if present.size == ds.n_classes:
        return ds
    return Dataset(ds.features, y + 1, ds.feature_names)


def select_features(train: Dataset, method: MethodConfig, k: int, gamma: float | None = None):
    """Indices (ascending) of ``k`` features chosen on ``train``.

    The ``all`` control ignores ``k`` and keeps every feature.

    Returns ``(indices, runs)`` where ``runs`` lists the cutting-plane
    results for ``gfs`` and is empty otherwise.
    """
    d = train.n_features
    if not 1 <= k <= d:
        raise ValueError(f"num_features must lie in [1, {d}], got {k}")
    name = method.name
    if name == "all":
        return np.arange(d), []
    if name == "laplacian":
        return top_m(laplacian_scores(train, method.k_neighbors, method.heat_bandwidth), k), []
    train = _compact_labels(train)
    if name == "fisher":
        return top_m(fisher_scores(train), k), []
    if name == "hsic":
        return top_m(hsic_scores(train), k), []
    g = method.gamma if gamma is None else gamma
    sel = gfs_selection_path(train, g, [k], method.solver)[k]
    return sel.indices, sel.runs


def stratified_folds(labels, folds: int, seed) -> np.ndarray:
    """Fold id per sample; each class is dealt round-robin from a shuffle."""
    rng = np.random.default_rng(seed)
    labels = np.asarray(labels)
    fold_of = np.empty(labels.size, dtype=np.int64)
    offset = int(rng.integers(folds))
    for cls in np.unique(labels):
        idx = rng.permutation(np.flatnonzero(labels == cls))
        fold_of[idx] = (offset + np.arange(idx.size)) % folds
        offset = (offset + idx.size) % folds
    return fold_of


def cross_validate_gamma(train: Dataset, grid, folds: int, method: MethodConfig, k: int, seed=0) -> float:
    """Grid value with the best mean fold accuracy (first wins ties)."""
    grid = [float(g) for g in grid]
    if not grid:
        raise ValueError("empty gamma grid")
    if len(grid) == 1:
        return grid[0]
    fold_of = stratified_folds(train.labels, folds, seed)
    splits = []
    for f in range(folds):
        tr, va = np.flatnonzero(fold_of != f), np.flatnonzero(fold_of == f)
        if va.size == 0 or tr.size < 2:
            continue
        splits.append((train.subset_samples(tr), tr, va))
    if not splits:
        raise DataError("training set too small for cross-validation")

    best_gamma, best_score = grid[0], -np.inf
    for g in grid:
        accs = []
        for fold_train, tr, va in splits:
            idx, _ = select_features(fold_train, method, k, gamma=g)
            pred = knn1_predict(fold_train.subset_features(idx), train.features[np.ix_(idx, va)])
            accs.append(accuracy(pred, train.labels[va]))
        score = float(np.mean(accs))
        if score > best_score:
            best_gamma, best_score = g, score
    return best_gamma


def _trace_summary(runs) -> list[dict]:
    return [
        {
            "m": i + 1,
            "termination": run.trace.termination,
            "iterations": [
                {"t": e.iteration, "theta": e.theta, "lower": e.lower, "upper": e.upper}
                for e in run.trace.entries
            ],
        }
        for i, run in enumerate(runs)
    ]


def run_trial(ds: Dataset, method: MethodConfig, trial_index: int, train_frac: float, k: int, seed: int,
              keep_trace: bool = False) -> TrialResult:
    train, test = split_train_test(ds, train_frac, [seed, trial_index])
    std = fit_standardizer(train)
    train, test = apply_standardizer(std, train), apply_standardizer(std, test)
    gamma = None
    if method.name == "gfs":
        gamma = method.gamma
        if method.gamma_grid is not None:
            gamma = cross_validate_gamma(train, method.gamma_grid, method.folds, method, k,
                                         seed=[seed, trial_index, 1])
    idx, runs = select_features(train, method, k, gamma=gamma)
    pred = knn1_predict(train.subset_features(idx), test.features[idx])
    return TrialResult(
        trial_index,
        [int(i) for i in idx],
        accuracy(pred, test.labels),
        gamma,
        _trace_summary(runs) if keep_trace and runs else None,
    )


def run_trials(ds: Dataset, method: MethodConfig, num_trials: int, train_frac: float, num_features: int,
               seed: int = 0, keep_trace: bool = False) -> AggregateResult:
    """Repeat the split/select/classify protocol and aggregate accuracies."""
    if num_trials < 1:
        raise ValueError("num_trials must be >= 1")
    trials = [
        run_trial(ds, method, t, train_frac, num_features, seed, keep_trace) for t in range(num_trials)
    ]
    return AggregateResult.from_trials(method.name, trials)


def curve_trial(ds: Dataset, method: MethodConfig, ks, trial_index: int, train_frac: float, seed: int) -> dict[int, float]:
    """Accuracy for every feature count in ``ks`` on one split.

    Filters rank once per split; ``gfs`` sweeps ``m`` once and reads every
    ``k`` off that sweep. A gamma grid is tuned at the largest ``k``.
    """
    ks = sorted({int(k) for k in ks})
    train, test = split_train_test(ds, train_frac, [seed, trial_index])
    std = fit_standardizer(train)
    train, test = apply_standardizer(std, train), apply_standardizer(std, test)
    name = method.name
    if name == "gfs":
        gamma = method.gamma
        if method.gamma_grid is not None:
            gamma = cross_validate_gamma(train, method.gamma_grid, method.folds, method, ks[-1],
                                         seed=[seed, trial_index, 1])
        path = gfs_selection_path(_compact_labels(train), gamma, ks, method.solver)
        chosen = {k: path[k].indices for k in ks}
    elif name == "all":
        chosen = {k: np.arange(train.n_features) for k in ks}
    else:
        if name == "laplacian":
            sv = laplacian_scores(train, method.k_neighbors, method.heat_bandwidth)
        elif name == "fisher":
            sv = fisher_scores(_compact_labels(train))
        else:
            sv = hsic_scores(_compact_labels(train))
        chosen = {k: top_m(sv, k) for k in ks}
    out = {}
    for k, idx in chosen.items():
        pred = knn1_predict(train.subset_features(idx), test.features[idx])
        out[k] = accuracy(pred, test.labels)
    return out


def accuracy_curve(ds: Dataset, methods, ks, num_trials: int, train_frac: float, seed: int = 0) -> list[tuple]:
    """Rows ``(k, method, mean, std)`` sorted by method, then ``k``."""
    rows = []
    for method in methods:
        per_trial = [curve_trial(ds, method, ks, t, train_frac, seed) for t in range(num_trials)]
        for k in sorted(per_trial[0]):
            acc = np.array([tr[k] for tr in per_trial])
            rows.append((k, method.name, float(acc.mean()), float(acc.std())))
    rows.sort(key=lambda r: (r[1], r[0]))
    return rows
