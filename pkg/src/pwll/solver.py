"""Constrained solve of the reweighted, tau-shifted Laplace system."""

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .errors import EmptyLabeledSet, SolverDiverged
from .graphs import SparseOperator, assemble_laplacian

__all__ = ["LabelState", "NodeFunction", "cg_solve", "solve_pwll", "classify"]


@dataclass(frozen=True)
class LabelState:
    """Ordered labeled set with observed classes and one-hot boundary rows."""

    labeled: np.ndarray
    classes: np.ndarray
    n_classes: int

    def __post_init__(self):
        labeled = np.asarray(self.labeled, dtype=np.int64).ravel()
        classes = np.asarray(self.classes, dtype=np.int64).ravel()
        object.__setattr__(self, "labeled", labeled)
        object.__setattr__(self, "classes", classes)
        if labeled.shape != classes.shape:
            raise ValueError("labeled indices and classes must align")
        if len(np.unique(labeled)) != len(labeled):
            raise ValueError("labeled indices must be distinct")
        if labeled.size and (labeled.min() < 0):
            raise ValueError("labeled indices must be nonnegative")
        if classes.size and (classes.min() < 0 or classes.max() >= self.n_classes):
            raise ValueError("observed classes must lie in 0..C-1")

    @property
    def Y(self):
        Y = np.zeros((len(self.labeled), self.n_classes))
        Y[np.arange(len(self.labeled)), self.classes] = 1.0
        return Y

    @property
    def observed(self):
        return {int(i): int(c) for i, c in zip(self.labeled, self.classes)}

    def is_labeled(self, index):
        return bool(np.any(self.labeled == index))

    def with_label(self, index, cls):
        """Return a new state with one more labeled point appended."""
        if self.is_labeled(index):
            raise ValueError(f"index {index} already labeled")
        return LabelState(labeled=np.append(self.labeled, index),
                          classes=np.append(self.classes, cls),
                          n_classes=self.n_classes)


@dataclass(frozen=True)
class NodeFunction:
    """N x C class-score matrix, the solution of the constrained system."""

    u: np.ndarray
    tau: float
    residual: float = 0.0

    @property
    def n_classes(self):
        return self.u.shape[1]


def cg_solve(operator, rhs, tol=1e-9, maxiter=None, x0=None):
    """Column-wise conjugate gradient with Jacobi preconditioning.

    Solves A X = B for a symmetric positive definite sparse A and a matrix
    right-hand side; every column runs its own CG recurrence but they share
    the matrix-vector products. Converged columns simply stop moving.

    Parameters
    ----------
    operator : scipy sparse matrix or SparseOperator
        If a SparseOperator carries a nonzero shift, it is added on the
        diagonal (on `shift_indices` when given, else everywhere).
    rhs : numpy array (m,) or (m, C)
    tol : float (optional), default=1e-9
        Relative residual target per column.
    maxiter : int (optional), default=10*m
    x0 : numpy array like rhs (optional)
        Warm start.

    Returns
    -------
    X : numpy array, same shape as rhs

    Raises
    ------
    SolverDiverged
        If any column misses `tol` after `maxiter` iterations; the exception
        carries the per-column relative residuals.
    """
    if isinstance(operator, SparseOperator):
        A = operator.matrix
        if operator.shift:
            shift = np.zeros(A.shape[0])
            idx = (operator.shift_indices if operator.shift_indices is not None
                   else np.arange(A.shape[0]))
            shift[idx] = operator.shift
            A = A + sparse.diags(shift)
    else:
        A = operator
    A = A.tocsr()

    B = np.asarray(rhs, dtype=np.float64)
    single = B.ndim == 1
    if single:
        B = B[:, None]
    m = A.shape[0]
    if maxiter is None:
        maxiter = 10 * m

    if x0 is None:
        X = np.zeros_like(B)
    else:
        X = np.asarray(x0, dtype=np.float64).reshape(B.shape).copy()
    bnorm = np.linalg.norm(B, axis=0)
    target = tol * np.where(bnorm > 0, bnorm, 1.0)

    dinv = 1.0 / A.diagonal()
    R = B - A @ X
    Z = dinv[:, None] * R
    P = Z.copy()
    rz = np.sum(R * Z, axis=0)
    for _ in range(maxiter):
        resid = np.linalg.norm(R, axis=0)
        if np.all(resid <= target):
            break
        AP = A @ P
        pap = np.sum(P * AP, axis=0)
        alpha = np.divide(rz, pap, out=np.zeros_like(rz), where=pap > 0)
        X += alpha * P
        R -= alpha * AP
        Z = dinv[:, None] * R
        rz_new = np.sum(R * Z, axis=0)
        beta = np.divide(rz_new, rz, out=np.zeros_like(rz), where=rz > 0)
        P = Z + beta * P
        rz = rz_new

    resid = np.linalg.norm(B - A @ X, axis=0)
    rel = resid / np.where(bnorm > 0, bnorm, 1.0)
    if np.any(rel > 100 * tol):
        raise SolverDiverged(
            "CG missed tolerance; per-column relative residuals: "
            + ", ".join(f"{r:.3e}" for r in rel), residuals=rel)
    return X[:, 0] if single else X


def solve_pwll(graph, gamma, labels, tau, tol=1e-9, warm_start=None):
    """Solve the tau-regularized reweighted Laplace system for class scores.

    Labeled rows are pinned to their one-hot vectors; on the unlabeled set
    the stationarity condition is tau*u_i + sum_j g_i g_j w_ij (u_i - u_j) = 0,
    i.e. the linear system ((L_g)_UU + tau*I) u_U = (A_g)_UL Y, solved one
    conjugate-gradient run per class column.

    Parameters
    ----------
    graph : SimilarityGraph
    gamma : NodeWeights, numpy array, or None
        Per-node reweighting (None for uniform ones).
    labels : LabelState
    tau : float
        Nonnegative diagonal shift on the unlabeled block.
    tol : float (optional), default=1e-9
    warm_start : NodeFunction or numpy array (N x C) (optional)
        Previous solution; its unlabeled rows seed the CG run.

    Returns
    -------
    node_fn : NodeFunction
    """
    if len(labels.labeled) == 0:
        raise EmptyLabeledSet("solve needs at least one labeled node")
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    n = graph.n_nodes
    c = labels.n_classes
    if labels.labeled.max() >= n:
        raise ValueError("labeled index out of range")

    L = assemble_laplacian(graph, gamma).matrix
    Y = labels.Y
    unlabeled = np.setdiff1d(np.arange(n), labels.labeled, assume_unique=False)

    u = np.zeros((n, c))
    u[labels.labeled] = Y
    residual = 0.0
    if unlabeled.size:
        # off-diagonal of L is -A, so -L_UL Y is the adjacency coupling term
        B = -(L[unlabeled][:, labels.labeled] @ Y)
        A_sys = L[unlabeled][:, unlabeled]
        if tau > 0:
            A_sys = A_sys + tau * sparse.identity(unlabeled.size, format="csr")
        x0 = None
        if warm_start is not None:
            prev = getattr(warm_start, "u", warm_start)
            if prev.shape == (n, c):
                x0 = prev[unlabeled]
        X = cg_solve(A_sys, B, tol=tol, maxiter=10 * n, x0=x0)
        u[unlabeled] = X
        bnorm = np.linalg.norm(B, axis=0)
        resid = np.linalg.norm(B - A_sys @ X, axis=0)
        residual = float(np.max(resid / np.where(bnorm > 0, bnorm, 1.0)))
    return NodeFunction(u=u, tau=float(tau), residual=residual)


def classify(u):
    """Per-row argmax of the class scores; ties go to the lowest class index."""
    scores = getattr(u, "u", u)
    return np.argmax(scores, axis=1)
