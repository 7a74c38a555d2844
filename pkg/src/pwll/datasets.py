"""Synthetic dataset generators, relabeling, and kNN density estimation."""

from dataclasses import dataclass

import numpy as np

from .errors import KTooLarge
from .graphs import knn_distances

__all__ = ["Dataset", "KdeEstimate", "gen_blobs", "gen_box", "gen_embedding_mixture",
           "relabel_mod_k", "knn_kde", "nearest_rank_percentile"]

# removes exactly the lattice column nearest x = 0.3; anything wider opens a
# >= 2-column gap that k=10 kNN edges cannot bridge and disconnects the graph
BOX_BAND_HALF_WIDTH = 0.01


@dataclass(frozen=True)
class Dataset:
    """Feature vectors with classification targets and cluster structure.

    `cluster_ids` partition the points into ground-truth clusters; each class
    is a union of clusters (they coincide until mod-k relabeling is applied).
    """

    features: np.ndarray
    true_labels: np.ndarray
    cluster_ids: np.ndarray
    name: str

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=np.float64)
        labels = np.asarray(self.true_labels, dtype=np.int64)
        clusters = np.asarray(self.cluster_ids, dtype=np.int64)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "true_labels", labels)
        object.__setattr__(self, "cluster_ids", clusters)
        n = feats.shape[0]
        if n < 2:
            raise ValueError("dataset needs at least 2 points")
        if labels.shape != (n,) or clusters.shape != (n,):
            raise ValueError("labels and cluster ids must have one entry per point")
        c = labels.max() + 1
        if labels.min() < 0 or len(np.unique(labels)) != c:
            raise ValueError("every class in 0..C-1 must appear at least once")
        # each cluster maps to a single class
        for cid in np.unique(clusters):
            if len(np.unique(labels[clusters == cid])) != 1:
                raise ValueError(f"cluster {cid} spans more than one class")

    @property
    def n_points(self):
        return self.features.shape[0]

    @property
    def n_classes(self):
        return int(self.true_labels.max()) + 1

    @property
    def n_clusters(self):
        return len(np.unique(self.cluster_ids))


@dataclass(frozen=True)
class KdeEstimate:
    """kNN kernel density estimate with its low-density cutoff.

    `threshold` is the nearest-rank 10th percentile of `values`; points
    strictly below it are treated as outliers by the filtered query policy.
    """

    values: np.ndarray
    k: int
    threshold: float


def gen_blobs(seed):
    """Eight Gaussian clusters of 300 points on the unit circle.

    Cluster i is sampled from a Gaussian with mean
    (cos(pi*i/4), sin(pi*i/4)) and standard deviation 0.17; classes alternate
    around the ring (cluster i -> class i mod 2).

    Parameters
    ----------
    seed : int
        RNG seed; the dataset is a deterministic function of it.

    Returns
    -------
    dataset : Dataset
        2400 points, 2 classes, 8 clusters.
    """
    rng = np.random.default_rng(seed)
    per_cluster = 300
    sigma = 0.17
    feats = []
    clusters = []
    for i in range(8):
        mean = np.array([np.cos(np.pi * i / 4), np.sin(np.pi * i / 4)])
        feats.append(mean + sigma * rng.standard_normal((per_cluster, 2)))
        clusters.append(np.full(per_cluster, i))
    features = np.vstack(feats)
    cluster_ids = np.concatenate(clusters)
    return Dataset(features=features, true_labels=cluster_ids % 2,
                   cluster_ids=cluster_ids, name=f"blobs-{seed}")


def gen_box():
    """65 x 65 unit-square lattice with a thin vertical band removed at x = 0.3.

    The band also defines the class boundary: class 0 left of it, class 1 to
    the right. One cluster per class.
    """
    ticks = np.arange(65) / 64.0
    xx, yy = np.meshgrid(ticks, ticks, indexing="ij")
    features = np.column_stack([xx.ravel(), yy.ravel()])
    keep = np.abs(features[:, 0] - 0.3) >= BOX_BAND_HALF_WIDTH
    features = features[keep]
    labels = (features[:, 0] > 0.3).astype(np.int64)
    return Dataset(features=features, true_labels=labels,
                   cluster_ids=labels.copy(), name="box")


def gen_embedding_mixture(seed, n_points=1500, n_clusters=10, dim=8):
    """Anisotropic Gaussian mixture standing in for a learned embedding.

    Used to build the shipped desk-scale fixture: cluster centers are drawn
    on a sphere, each cluster gets its own random covariance, and sizes are
    mildly unbalanced.
    """
    rng = np.random.default_rng(seed)
    centers = rng.standard_normal((n_clusters, dim))
    centers /= np.linalg.norm(centers, axis=1, keepdims=True)
    centers *= 2.2
    # skewed cluster sizes: uniform draws cover the small clusters slowly
    weights = rng.dirichlet(np.full(n_clusters, 0.8))
    floor = max(n_points // (20 * n_clusters), 2)
    sizes = np.maximum((weights * (n_points - floor * n_clusters)).astype(int), 0) + floor
    sizes[0] += n_points - sizes.sum()
    feats = []
    clusters = []
    for i in range(n_clusters):
        basis = rng.standard_normal((dim, dim))
        scales = 0.45 + 0.55 * rng.random(dim)
        cov_half = basis * scales / np.sqrt(dim)
        feats.append(centers[i] + rng.standard_normal((sizes[i], dim)) @ cov_half)
        clusters.append(np.full(sizes[i], i))
    features = np.vstack(feats)
    cluster_ids = np.concatenate(clusters)
    return Dataset(features=features, true_labels=cluster_ids.copy(),
                   cluster_ids=cluster_ids, name=f"embedding-mixture-{seed}")


def relabel_mod_k(dataset, k):
    """Collapse C original classes onto k classes by y -> y mod k.

    The original classes become the cluster structure of the result, so a
    dataset relabeled this way has multiple clusters per class. k = C is the
    identity relabeling.

    Raises
    ------
    KTooLarge
        If k exceeds the original number of classes or k < 1.
    """
    c = dataset.n_classes
    if k > c or k < 1:
        raise KTooLarge(f"k={k} must be in 1..{c}")
    return Dataset(features=dataset.features,
                   true_labels=dataset.true_labels % k,
                   cluster_ids=dataset.true_labels.copy(),
                   name=f"{dataset.name}-mod{k}")


def nearest_rank_percentile(values, pct):
    """Nearest-rank percentile: the ceil(pct/100 * n)-th smallest value."""
    v = np.sort(np.asarray(values).ravel())
    n = len(v)
    rank = int(np.ceil(pct / 100.0 * n))
    return float(v[min(max(rank, 1), n) - 1])


def knn_kde(features, k):
    """k-nearest-neighbor density estimate 1 / d_k(x).

    A small additive guard (1e-12) keeps values finite at duplicate points.
    The returned threshold is the nearest-rank 10th percentile of the values.

    Parameters
    ----------
    features : numpy array (N x d)
    k : int
        Neighbor order, 1 <= k <= N-1.

    Returns
    -------
    kde : KdeEstimate
    """
    _, dist = knn_distances(features, k)
    values = 1.0 / (dist[:, -1] + 1e-12)
    return KdeEstimate(values=values, k=k,
                       threshold=nearest_rank_percentile(values, 10.0))
