import numpy as np
import pytest

from pwll.datasets import (BOX_BAND_HALF_WIDTH, Dataset, gen_blobs, gen_box,
                           gen_embedding_mixture, knn_kde, nearest_rank_percentile,
                           relabel_mod_k)
from pwll.errors import KTooLarge


def test_blobs_shape_and_structure():
    ds = gen_blobs(0)
    assert ds.n_points == 2400
    assert ds.n_classes == 2
    assert ds.n_clusters == 8
    assert np.all(np.bincount(ds.cluster_ids) == 300)
    assert np.array_equal(ds.true_labels, ds.cluster_ids % 2)


def test_blobs_cluster_means_near_targets():
    ds = gen_blobs(1)
    tol = 0.17 / np.sqrt(300) * 4          # 4 sigma of the mean, per coordinate
    for i in range(8):
        target = np.array([np.cos(np.pi * i / 4), np.sin(np.pi * i / 4)])
        mean = ds.features[ds.cluster_ids == i].mean(axis=0)
        assert np.all(np.abs(mean - target) <= tol)


def test_blobs_deterministic():
    a, b = gen_blobs(7), gen_blobs(7)
    assert np.array_equal(a.features, b.features)
    assert np.array_equal(a.true_labels, b.true_labels)
    c = gen_blobs(8)
    assert not np.array_equal(a.features, c.features)


def test_box_lattice_and_band():
    ds = gen_box()
    assert 65 * 65 == 4225                 # full lattice before removal
    assert ds.n_points == 4225 - 65        # one column removed
    assert np.all(np.abs(ds.features[:, 0] - 0.3) >= BOX_BAND_HALF_WIDTH)
    assert np.array_equal(ds.true_labels, (ds.features[:, 0] > 0.3).astype(int))
    assert ds.n_clusters == 2


def test_box_sides_connected():
    from scipy.sparse.csgraph import connected_components
    from pwll.graphs import build_knn_graph
    ds = gen_box()
    g = build_knn_graph(ds.features, 10)
    for c in (0, 1):
        mask = ds.true_labels == c
        sub = g.adjacency[mask][:, mask]
        assert connected_components(sub, directed=False)[0] == 1


def test_relabel_mod_k_table():
    labels = np.arange(10).repeat(5)
    ds = Dataset(features=np.random.default_rng(0).standard_normal((50, 2)),
                 true_labels=labels, cluster_ids=labels.copy(), name="ten")
    out = relabel_mod_k(ds, 3)
    # class 0 collects original clusters {0, 3, 6, 9}
    assert set(out.cluster_ids[out.true_labels == 0].tolist()) == {0, 3, 6, 9}
    assert set(out.cluster_ids[out.true_labels == 1].tolist()) == {1, 4, 7}
    assert out.n_clusters == 10


def test_relabel_mod_k_identity_and_47_classes():
    labels = np.arange(10).repeat(3)
    ds = Dataset(features=np.zeros((30, 2)) + np.arange(30)[:, None],
                 true_labels=labels, cluster_ids=labels.copy(), name="ten")
    same = relabel_mod_k(ds, 10)
    assert np.array_equal(same.true_labels, ds.true_labels)

    labels47 = np.arange(47).repeat(2)
    ds47 = Dataset(features=np.arange(94, dtype=float)[:, None],
                   true_labels=labels47, cluster_ids=labels47.copy(), name="em")
    out = relabel_mod_k(ds47, 5)
    assert set(out.cluster_ids[out.true_labels == 4].tolist()) == set(range(4, 45, 5))


def test_relabel_mod_k_too_large():
    labels = np.array([0, 1, 0, 1])
    ds = Dataset(features=np.arange(4, dtype=float)[:, None],
                 true_labels=labels, cluster_ids=labels.copy(), name="two")
    with pytest.raises(KTooLarge):
        relabel_mod_k(ds, 3)


def test_dataset_invariants_enforced():
    with pytest.raises(ValueError):
        Dataset(features=np.zeros((4, 1)), true_labels=np.array([0, 0, 2, 2]),
                cluster_ids=np.zeros(4, dtype=int), name="gap")  # class 1 missing
    with pytest.raises(ValueError):
        Dataset(features=np.zeros((4, 1)), true_labels=np.array([0, 1, 0, 1]),
                cluster_ids=np.array([0, 0, 1, 1]), name="split-cluster")


def test_knn_kde_uniform_grid():
    h = 0.25
    features = (np.arange(50) * h)[:, None]
    kde = knn_kde(features, 1)
    assert np.allclose(kde.values, 1.0 / (h + 1e-12), rtol=1e-12)
    assert kde.threshold == pytest.approx(1.0 / (h + 1e-12))


def test_knn_kde_outlier_below_threshold():
    h = 0.1
    grid = np.arange(100) * h
    features = np.append(grid, grid[-1] + 10 * h)[:, None]
    kde = knn_kde(features, 1)
    assert kde.values[-1] == pytest.approx(1.0 / (10 * h), rel=1e-6)
    assert kde.values[-1] < kde.threshold


def test_knn_kde_translation_invariant():
    rng = np.random.default_rng(13)
    X = rng.standard_normal((60, 3))
    a = knn_kde(X, 5)
    b = knn_kde(X + 17.5, 5)
    assert np.allclose(a.values, b.values, rtol=1e-9)


def test_nearest_rank_percentile():
    values = np.arange(1, 11)
    assert nearest_rank_percentile(values, 10) == 1
    assert nearest_rank_percentile(values, 50) == 5
    assert nearest_rank_percentile(values, 100) == 10


def test_embedding_mixture_structure():
    ds = gen_embedding_mixture(3, n_points=400, n_clusters=10, dim=8)
    assert ds.n_points == 400
    assert ds.n_clusters == 10
    assert ds.features.shape == (400, 8)
    again = gen_embedding_mixture(3, n_points=400, n_clusters=10, dim=8)
    assert np.array_equal(ds.features, again.features)
