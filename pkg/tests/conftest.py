import numpy as np
import pytest
from scipy import sparse

from pwll.datasets import gen_blobs
from pwll.graphs import SimilarityGraph, assemble_laplacian, build_knn_graph
from pwll.solver import LabelState


@pytest.fixture(scope="session")
def blobs_dataset():
    return gen_blobs(0)


@pytest.fixture(scope="session")
def blobs_graph(blobs_dataset):
    return build_knn_graph(blobs_dataset.features, 10)


@pytest.fixture
def p3_graph():
    """Path graph 0-1-2 with unit weights."""
    W = sparse.csr_matrix(np.array([[0., 1., 0.], [1., 0., 1.], [0., 1., 0.]]))
    return SimilarityGraph(n_nodes=3, adjacency=W, k=1)


def random_connected_graph(rng, n):
    """Random sparse symmetric weighted graph, forced connected by a cycle."""
    density = rng.uniform(0.05, 0.3)
    W = np.triu((rng.random((n, n)) < density) * rng.uniform(0.1, 1.0, (n, n)), k=1)
    idx = np.arange(n)
    W[idx[:-1], idx[1:]] = np.maximum(W[idx[:-1], idx[1:]], rng.uniform(0.1, 1.0, n - 1))
    W = W + W.T
    return SimilarityGraph(n_nodes=n, adjacency=sparse.csr_matrix(W), k=0)


def chain_graph(n):
    """Uniform 1d chain with unit weights."""
    W = sparse.diags([np.ones(n - 1), np.ones(n - 1)], [-1, 1]).tocsr()
    return SimilarityGraph(n_nodes=n, adjacency=W, k=1)


def random_label_state(rng, n, c):
    """Random labeled set covering every class at least once."""
    m = int(rng.integers(c, max(c + 1, n // 3)))
    labeled = rng.choice(n, size=m, replace=False)
    classes = np.concatenate([np.arange(c), rng.integers(0, c, m - c)])
    return LabelState(labeled=labeled, classes=classes[:m], n_classes=c)


def dense_pwll_oracle(graph, gamma, labels, tau):
    """Dense direct solve of ((L_g)_UU + tau I) u_U = (A_g)_UL Y."""
    n = graph.n_nodes
    g = np.ones(n) if gamma is None else np.asarray(getattr(gamma, "gamma", gamma))
    W = graph.adjacency.toarray()
    A = np.outer(g, g) * W
    L = np.diag(A.sum(axis=1)) - A
    Y = labels.Y
    u = np.zeros((n, labels.n_classes))
    u[labels.labeled] = Y
    U = np.setdiff1d(np.arange(n), labels.labeled)
    if U.size:
        lhs = L[np.ix_(U, U)] + tau * np.eye(U.size)
        rhs = A[np.ix_(U, labels.labeled)] @ Y
        u[U] = np.linalg.solve(lhs, rhs)
    return u


def dense_poisson_oracle(graph, labeled):
    """Mean-zero graph Poisson solution via a bordered dense solve."""
    n = graph.n_nodes
    L = assemble_laplacian(graph).matrix.toarray()
    f = np.full(n, -len(labeled) / n)
    f[np.asarray(labeled)] += 1.0
    A = np.zeros((n + 1, n + 1))
    A[:n, :n] = L
    A[n, :n] = 1.0
    A[:n, n] = 1.0
    b = np.append(f, 0.0)
    return np.linalg.solve(A, b)[:n]
