"""Similarity graph construction and reweighted Laplacian assembly."""

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .errors import DegenerateFeatures, DisconnectedGraph, NonPositiveGamma

__all__ = ["SimilarityGraph", "SparseOperator", "knn_distances", "build_knn_graph",
           "assemble_laplacian"]


@dataclass(frozen=True)
class SimilarityGraph:
    """Symmetric weighted kNN graph over N feature vectors.

    `adjacency` is CSR, symmetric, nonnegative, with zero diagonal. Immutable
    after construction and safe to share across threads.
    """

    n_nodes: int
    adjacency: sparse.csr_matrix
    k: int

    def degrees(self):
        return np.asarray(self.adjacency.sum(axis=1)).ravel()


@dataclass(frozen=True)
class SparseOperator:
    """Symmetric PSD operator L = D - A, optionally with a diagonal shift.

    `shift` is applied on `shift_indices` when the operator is restricted for
    a solve; the stored matrix itself is the unshifted Laplacian.
    """

    matrix: sparse.csr_matrix
    shift: float = 0.0
    shift_indices: np.ndarray | None = field(default=None)


def knn_distances(features, k, chunk=512):
    """Exact k-nearest-neighbor search with deterministic tie-breaking.

    Brute-force Euclidean distances, processed in row chunks to bound memory.
    Ties are broken by lowest index (stable sort), so results do not depend
    on any spatial-index traversal order. Self is excluded.

    Parameters
    ----------
    features : numpy array (N x d)
    k : int
        Number of neighbors per node, 1 <= k <= N-1.

    Returns
    -------
    neigh : numpy array (N x k, int)
        Indices of the k nearest neighbors of each node, nearest first.
    dist : numpy array (N x k)
        Corresponding Euclidean distances.
    """
    X = np.ascontiguousarray(features, dtype=np.float64)
    n = X.shape[0]
    if not 1 <= k <= n - 1:
        raise ValueError(f"k={k} requires 1 <= k <= N-1 (N={n})")
    if not np.all(np.isfinite(X)):
        raise ValueError("features must be finite")

    sq = np.sum(X * X, axis=1)
    neigh = np.empty((n, k), dtype=np.int64)
    dist = np.empty((n, k))
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        d2 = sq[start:stop, None] + sq[None, :] - 2.0 * (X[start:stop] @ X.T)
        np.maximum(d2, 0.0, out=d2)
        d2[np.arange(start, stop) - start, np.arange(start, stop)] = np.inf
        order = np.argsort(d2, axis=1, kind="stable")[:, :k]
        neigh[start:stop] = order
        dist[start:stop] = np.sqrt(np.take_along_axis(d2, order, axis=1))
    return neigh, dist


def build_knn_graph(features, k, allow_jitter=False):
    """Build a self-tuning Gaussian kNN similarity graph.

    Each node i is connected to its k nearest Euclidean neighbors with
    weight exp(-4 |x_i - x_j|^2 / d_k(x_i)^2), where d_k(x_i) is the distance
    to the k-th neighbor. The directed weight matrix is symmetrized by
    averaging, (W + W^T)/2, which halves one-sided kNN edges.

    Parameters
    ----------
    features : numpy array (N x d)
    k : int
        Neighbors per node. N >= k+1 required.
    allow_jitter : bool (optional), default=False
        Resolve duplicate points by a deterministic jitter of
        1e-9 * (feature scale) instead of raising DegenerateFeatures.

    Returns
    -------
    graph : SimilarityGraph

    Raises
    ------
    DegenerateFeatures
        If some d_k(x_i) = 0 and `allow_jitter` is False.
    DisconnectedGraph
        If the symmetrized graph has more than one component.
    """
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("features must be a 2d array")
    n = X.shape[0]

    neigh, dist = knn_distances(X, k)
    bandwidth = dist[:, -1]
    if np.any(bandwidth == 0.0):
        if not allow_jitter:
            raise DegenerateFeatures(
                "duplicate points give zero kNN bandwidth; "
                "pass allow_jitter=True to perturb them")
        scale = float(np.max(np.ptp(X, axis=0)))
        rng = np.random.default_rng(0)
        X = X + 1e-9 * max(scale, 1.0) * rng.standard_normal(X.shape)
        neigh, dist = knn_distances(X, k)
        bandwidth = dist[:, -1]
        if np.any(bandwidth == 0.0):
            raise DegenerateFeatures("duplicate points persist after jitter")

    rows = np.repeat(np.arange(n), k)
    cols = neigh.ravel()
    vals = np.exp(-4.0 * (dist ** 2) / (bandwidth[:, None] ** 2)).ravel()
    W = sparse.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    W = (W + W.T) / 2.0
    W.setdiag(0.0)
    W.eliminate_zeros()

    n_comp, _ = connected_components(W, directed=False)
    if n_comp != 1:
        raise DisconnectedGraph(f"graph has {n_comp} components; "
                                "increase k or clean the data")
    return SimilarityGraph(n_nodes=n, adjacency=W, k=k)


def assemble_laplacian(graph, gamma=None):
    """Assemble the reweighted graph Laplacian L = D - A.

    A[i,j] = gamma_i * gamma_j * w_ij and D is its diagonal degree matrix,
    so row sums of L are zero. With gamma omitted (or all ones) this is the
    standard combinatorial Laplacian.

    Parameters
    ----------
    graph : SimilarityGraph
    gamma : numpy array (N,) or NodeWeights or None (optional)
        Strictly positive per-node reweighting. None means uniform ones.

    Returns
    -------
    op : SparseOperator
    """
    W = graph.adjacency
    n = graph.n_nodes
    if gamma is None:
        A = W
    else:
        g = np.asarray(getattr(gamma, "gamma", gamma), dtype=np.float64).ravel()
        if g.shape != (n,):
            raise ValueError(f"gamma must have length {n}")
        if np.any(g <= 0.0):
            raise NonPositiveGamma("gamma must be strictly positive")
        G = sparse.diags(g)
        A = (G @ W @ G).tocsr()
    deg = np.asarray(A.sum(axis=1)).ravel()
    L = (sparse.diags(deg) - A).tocsr()
    return SparseOperator(matrix=L)
