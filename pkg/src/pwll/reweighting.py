"""Per-node reweighting from the graph Poisson equation sourced at labels."""

from dataclasses import dataclass

import numpy as np

from .errors import EmptyLabeledSet, SolverDiverged
from .graphs import assemble_laplacian

__all__ = ["NodeWeights", "solve_gamma"]


@dataclass(frozen=True)
class NodeWeights:
    """Reweighting values gamma >= 1 and the mean-zero solution behind them."""

    gamma: np.ndarray
    raw: np.ndarray


def solve_gamma(graph, labeled, tol=1e-9, x0=None):
    """Solve the graph Poisson equation for the reweighting gamma.

    The source puts unit mass on each labeled node and removes it uniformly,
    f_i = sum_{k in labeled} (delta_ik - 1/N), so f sums to zero and the
    singular system L w = f is consistent on a connected graph. The solution
    is pinned to mean zero and mapped to gamma = 1 + max(w, 0), which keeps
    the spike at labeled nodes while staying >= 1 everywhere.

    Parameters
    ----------
    graph : SimilarityGraph
    labeled : array-like of int
        Nonempty set of labeled node indices.
    tol : float (optional), default=1e-9
        Relative residual tolerance for conjugate gradient.
    x0 : numpy array (N,) (optional)
        Warm start for the Poisson solve.

    Returns
    -------
    weights : NodeWeights

    Raises
    ------
    EmptyLabeledSet, SolverDiverged
    """
    labeled = np.asarray(labeled, dtype=np.int64).ravel()
    if labeled.size == 0:
        raise EmptyLabeledSet("gamma solve needs at least one labeled node")
    n = graph.n_nodes

    f = np.full(n, -labeled.size / n)
    f[labeled] += 1.0

    L = assemble_laplacian(graph).matrix
    raw = _mean_zero_cg(L, f, tol=tol, maxiter=10 * n, x0=x0)
    return NodeWeights(gamma=1.0 + np.maximum(raw, 0.0), raw=raw)


def _mean_zero_cg(L, f, tol, maxiter, x0=None):
    # Jacobi-preconditioned CG on the singular system L x = f. The kernel is
    # the constants, so iterates are projected back to mean zero each step;
    # f is already mean-zero up to roundoff.
    n = L.shape[0]
    f = f - f.mean()
    fnorm = np.linalg.norm(f)
    if fnorm == 0.0:
        return np.zeros(n)

    dinv = 1.0 / L.diagonal()
    x = np.zeros(n) if x0 is None else np.asarray(x0, dtype=np.float64).copy()
    x -= x.mean()
    r = f - L @ x
    r -= r.mean()
    z = dinv * r
    p = z.copy()
    rz = r @ z
    for _ in range(maxiter):
        if np.linalg.norm(r) <= tol * fnorm:
            return x - x.mean()
        Lp = L @ p
        alpha = rz / (p @ Lp)
        x += alpha * p
        x -= x.mean()
        r -= alpha * Lp
        r -= r.mean()
        z = dinv * r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    res = np.linalg.norm(L @ x - f) / fnorm
    if res > 100 * tol:
        raise SolverDiverged(f"Poisson solve stalled at relative residual {res:.3e}",
                             residuals=np.array([res]))
    return x - x.mean()
