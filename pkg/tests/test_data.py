import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gfscore import (
    DataError,
    Dataset,
    apply_standardizer,
    center_columns,
    class_stats,
    fit_standardizer,
    scatter_matrices,
    split_train_test,
)

from conftest import random_dataset


def test_class_stats_small_example():
    ds = Dataset([[0, 1, 2, 3]], [1, 1, 2, 2])
    st_ = class_stats(ds)
    assert st_.counts.tolist() == [2, 2]
    np.testing.assert_allclose(st_.class_means, [[0.5, 2.5]])
    np.testing.assert_allclose(st_.overall_mean, [1.5])


def test_class_stats_constant_columns():
    v = np.array([1.0, -2.0, 3.5])
    ds = Dataset(np.tile(v[:, None], 5), [1, 2, 1, 2, 2])
    st_ = class_stats(ds)
    np.testing.assert_allclose(st_.class_means, np.tile(v[:, None], 2))
    np.testing.assert_allclose(st_.overall_mean, v)


def test_overall_mean_is_count_weighted_class_mean(rng):
    ds = random_dataset(rng, 4, 17, 3, center=False)
    s = class_stats(ds)
    np.testing.assert_allclose(s.overall_mean, s.class_means @ s.counts / ds.n_samples, atol=1e-10)
    assert s.counts.sum() == ds.n_samples


def test_scatter_small_example():
    ds = Dataset([[0, 1, 2, 3]], [1, 1, 2, 2])
    sc = scatter_matrices(ds)
    np.testing.assert_allclose(sc.between, [[4.0]])
    np.testing.assert_allclose(sc.total, [[5.0]])


def test_single_class_between_scatter_is_zero(rng):
    ds = Dataset(rng.normal(size=(3, 6)), np.ones(6, dtype=int))
    np.testing.assert_allclose(scatter_matrices(ds).between, 0.0, atol=1e-12)


def test_scatter_invariant_under_sample_permutation(rng):
    ds = random_dataset(rng, 5, 20, 3, center=False)
    perm = rng.permutation(20)
    a, b = scatter_matrices(ds), scatter_matrices(ds.subset_samples(perm))
    np.testing.assert_allclose(a.between, b.between, atol=1e-10)
    np.testing.assert_allclose(a.total, b.total, atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(1, 6), n=st.integers(4, 25), c=st.integers(1, 4))
def test_scatter_properties(seed, d, n, c):
    ds = random_dataset(np.random.default_rng(seed), d, n, min(c, n), center=False)
    sc = scatter_matrices(ds)
    for M in (sc.between, sc.total):
        np.testing.assert_allclose(M, M.T, atol=1e-10)
        assert np.linalg.eigvalsh(M).min() >= -1e-8
    assert np.linalg.matrix_rank(sc.between, tol=1e-8 * max(1.0, np.abs(sc.between).max())) <= ds.n_classes - 1
    # within-class scatter is what remains
    assert np.linalg.eigvalsh(sc.total - sc.between).min() >= -1e-8 * max(1.0, np.abs(sc.total).max())
    mu = ds.features.mean(axis=1, keepdims=True)
    assert np.trace(sc.total) == pytest.approx(np.sum((ds.features - mu) ** 2), abs=1e-8)


def test_standardizer_examples():
    ds = Dataset([[1.0, 3.0], [5.0, 5.0]], [1, 2])
    s = fit_standardizer(ds)
    np.testing.assert_allclose(s.per_feature_mean, [2.0, 5.0])
    np.testing.assert_allclose(s.per_feature_scale, [1.0, 1.0])
    np.testing.assert_allclose(apply_standardizer(s, ds).features, [[-1.0, 1.0], [0.0, 0.0]])


def test_standardized_training_rows(rng):
    ds = random_dataset(rng, 4, 30, 2, center=False).with_features(
        rng.normal(3.0, 5.0, size=(4, 30)) * np.array([[1], [0], [2], [1]])
    )
    s = fit_standardizer(ds)
    assert np.all(s.per_feature_scale > 0)
    Z = apply_standardizer(s, ds).features
    np.testing.assert_allclose(Z.mean(axis=1), 0.0, atol=1e-12)
    np.testing.assert_allclose(Z.std(axis=1), [1, 0, 1, 1], atol=1e-12)
    again = apply_standardizer(fit_standardizer(apply_standardizer(s, ds)), apply_standardizer(s, ds))
    np.testing.assert_allclose(again.features.mean(axis=1), 0.0, atol=1e-12)


def test_center_columns_examples():
    np.testing.assert_allclose(center_columns(Dataset([[1, 3]], [1, 2])).features, [[-1, 1]])
    out = center_columns(Dataset([[1, 2, 3], [0, 0, 6]], [1, 2, 1]))
    np.testing.assert_allclose(out.features, [[-1, 0, 1], [-2, -2, 4]])
    np.testing.assert_allclose(center_columns(out).features, out.features, atol=1e-15)


def test_center_columns_sums_to_zero(rng):
    out = center_columns(random_dataset(rng, 5, 13, 2, center=False))
    np.testing.assert_allclose(out.features.sum(axis=1), 0.0, atol=1e-10)


@pytest.mark.parametrize(
    "features, labels",
    [
        ([[0.0, np.nan]], [1, 2]),
        ([[0.0, np.inf]], [1, 2]),
        ([[0.0, 1.0]], [1, 3]),  # class 2 empty
        ([[0.0, 1.0]], [0, 1]),
        ([[0.0]], [1]),
        ([[0.0, 1.0]], [1.5, 1]),
    ],
)
def test_dataset_rejects_invalid(features, labels):
    with pytest.raises(DataError):
        Dataset(features, labels)


def test_split_is_a_deterministic_partition(rng):
    ds = random_dataset(rng, 3, 40, 3, center=False)
    tag = ds.with_features(np.vstack([ds.features, np.arange(40)]))
    a_tr, a_te = split_train_test(tag, 0.5, 7)
    b_tr, b_te = split_train_test(tag, 0.5, 7)
    np.testing.assert_array_equal(a_tr.features, b_tr.features)
    np.testing.assert_array_equal(a_te.features, b_te.features)
    ids_tr, ids_te = a_tr.features[-1].astype(int), a_te.features[-1].astype(int)
    assert set(ids_tr).isdisjoint(ids_te)
    assert sorted([*ids_tr, *ids_te]) == list(range(40))
    assert np.unique(a_tr.labels).size == 3


def test_split_half_of_four():
    ds = Dataset([[0, 1, 2, 3]], [1, 2, 1, 2])
    tr, te = split_train_test(ds, 0.5, 0)
    assert tr.n_samples == 2 and te.n_samples == 2


def test_split_unattainable_class_coverage():
    ds = Dataset([[0, 1, 2, 3, 4, 5]], [1, 1, 1, 1, 2, 3])
    with pytest.raises(DataError):
        split_train_test(ds, 0.34, 0)  # 2 training samples, 3 classes
