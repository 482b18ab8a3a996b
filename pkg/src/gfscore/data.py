"""Dataset container, preprocessing and class statistics.

Features are stored as a ``d x n`` matrix: rows are features, columns are
samples. Labels are integers in ``1..c``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_SPLIT_RETRIES = 100


class DataError(ValueError):
    """Raised when a dataset violates its invariants."""


@dataclass(frozen=True)
class Dataset:
    """Labelled data matrix with samples in columns.

    Parameters
    ----------
    features : array of shape (d, n)
    labels : array of shape (n,)
        Integer class labels in ``1..c``.
    feature_names : list of str, optional
    n_classes : int, optional
        Number of classes ``c``. When omitted it is inferred as
        ``max(labels)`` and every class must be present. When given
        explicitly, classes may be absent (held-out splits).
    class_names : list of str, optional
        Original label of each class, ``class_names[k-1]`` for class ``k``.
    """

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...] | None = None
    n_classes: int | None = field(default=None)
    class_names: tuple[str, ...] | None = None

    def __post_init__(self):
        X = np.array(self.features, dtype=float, copy=True)
        y = np.asarray(self.labels)
        if X.ndim != 2:
            raise DataError(f"features must be 2-D, got shape {X.shape}")
        d, n = X.shape
        if d < 1 or n < 2:
            raise DataError(f"need d >= 1 and n >= 2, got d={d}, n={n}")
        if not np.all(np.isfinite(X)):
            raise DataError("features contain non-finite entries")
        if y.shape != (n,):
            raise DataError(f"labels must have shape ({n},), got {y.shape}")
        if y.dtype.kind == "f":
            if not np.all(y == np.round(y)):
                raise DataError("labels must be integers")
        elif y.dtype.kind not in "iu":
            raise DataError(f"labels must be integers, got dtype {y.dtype}")
        y = y.astype(np.int64)
        if y.min() < 1:
            raise DataError("labels must be >= 1")
        if self.n_classes is None:
            c = int(y.max())
            missing = np.setdiff1d(np.arange(1, c + 1), y)
            if missing.size:
                raise DataError(f"empty class(es): {missing.tolist()}")
        else:
            c = int(self.n_classes)
            if y.max() > c:
                raise DataError(f"label {int(y.max())} exceeds n_classes={c}")
        names = self.feature_names
        if names is not None:
            names = tuple(str(s) for s in names)
            if len(names) != d:
                raise DataError(f"{len(names)} feature names for {d} features")
        cnames = self.class_names
        if cnames is not None:
            cnames = tuple(str(s) for s in cnames)
            if len(cnames) != c:
                raise DataError(f"{len(cnames)} class names for {c} classes")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "n_classes", c)
        object.__setattr__(self, "class_names", cnames)

    @property
    def n_features(self) -> int:
        return self.features.shape[0]

    @property
    def n_samples(self) -> int:
        return self.features.shape[1]

    def with_features(self, features: np.ndarray) -> Dataset:
        return Dataset(features, self.labels, self.feature_names, self.n_classes, self.class_names)

    def subset_samples(self, idx, n_classes: int | None = None) -> Dataset:
        idx = np.asarray(idx)
        return Dataset(
            self.features[:, idx],
            self.labels[idx],
            self.feature_names,
            self.n_classes if n_classes is None else n_classes,
            self.class_names,
        )

    def subset_features(self, idx) -> Dataset:
        idx = np.asarray(idx, dtype=np.int64)
        names = None
        if self.feature_names is not None:
            names = tuple(self.feature_names[i] for i in idx)
        return Dataset(self.features[idx], self.labels, names, self.n_classes, self.class_names)


@dataclass(frozen=True)
class ClassStats:
    counts: np.ndarray  # (c,)
    class_means: np.ndarray  # (d, c)
    overall_mean: np.ndarray  # (d,)


@dataclass(frozen=True)
class ScatterPair:
    between: np.ndarray
    total: np.ndarray


@dataclass(frozen=True)
class Standardizer:
    per_feature_mean: np.ndarray
    per_feature_scale: np.ndarray


def one_hot(labels, n_classes: int) -> np.ndarray:
    """Return the ``n x c`` indicator matrix of 1-based labels."""
    labels = np.asarray(labels)
    Y = np.zeros((labels.size, n_classes))
    Y[np.arange(labels.size), labels - 1] = 1.0
    return Y


def class_stats(ds: Dataset) -> ClassStats:
    Y = one_hot(ds.labels, ds.n_classes)
    counts = Y.sum(axis=0).astype(np.int64)
    if np.any(counts == 0):
        raise DataError(f"empty class(es): {(np.flatnonzero(counts == 0) + 1).tolist()}")
    means = (ds.features @ Y) / counts
    return ClassStats(counts, means, ds.features.mean(axis=1))


def scatter_matrices(ds: Dataset, stats: ClassStats | None = None) -> ScatterPair:
    """Between-class and total scatter, both unnormalised sums."""
    if stats is None:
        stats = class_stats(ds)
    diff = stats.class_means - stats.overall_mean[:, None]
    Sb = (diff * stats.counts) @ diff.T
    Xc = ds.features - stats.overall_mean[:, None]
    St = Xc @ Xc.T
    # symmetrise away rounding asymmetry
    return ScatterPair(0.5 * (Sb + Sb.T), 0.5 * (St + St.T))


def fit_standardizer(train: Dataset) -> Standardizer:
    mean = train.features.mean(axis=1)
    scale = train.features.std(axis=1)
    scale = np.where(scale > 0, scale, 1.0)
    return Standardizer(mean, scale)


def apply_standardizer(s: Standardizer, ds: Dataset) -> Dataset:
    X = (ds.features - s.per_feature_mean[:, None]) / s.per_feature_scale[:, None]
    return ds.with_features(X)


def center_columns(ds: Dataset) -> Dataset:
    """Subtract the mean sample so that the columns sum to zero."""
    return ds.with_features(ds.features - ds.features.mean(axis=1, keepdims=True))


def split_train_test(ds: Dataset, train_frac: float, seed) -> tuple[Dataset, Dataset]:
    """Random train/test partition whose training part covers every class.

    ``seed`` is anything accepted by :func:`numpy.random.default_rng`
    (an int, a sequence of ints, a ``SeedSequence``). Fold assignments
    are resampled up to ``MAX_SPLIT_RETRIES`` times.
    """
    if not 0.0 < train_frac < 1.0:
        raise ValueError(f"train_frac must lie in (0, 1), got {train_frac}")
    n, c = ds.n_samples, ds.n_classes
    n_train = int(round(train_frac * n))
    if n_train < 2 or n - n_train < 2:
        raise DataError(f"train_frac={train_frac} leaves fewer than 2 samples on one side (n={n})")
    if n_train < c:
        raise DataError(f"{n_train} training samples cannot cover {c} classes")
    rng = np.random.default_rng(seed)
    for _ in range(MAX_SPLIT_RETRIES):
        perm = rng.permutation(n)
        tr, te = np.sort(perm[:n_train]), np.sort(perm[n_train:])
        if np.unique(ds.labels[tr]).size == c:
            return ds.subset_samples(tr), ds.subset_samples(te, n_classes=c)
    raise DataError(
        f"could not draw a training split covering all {c} classes "
        f"in {MAX_SPLIT_RETRIES} attempts"
    )
