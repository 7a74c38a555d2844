"""Uncertainty scores, the tau decay schedule, and query-selection policies.

Scores follow the convention "higher = more desirable to query", so the
uncertainty measures are negated on entry: a point with small output-vector
norm (or small top-two margin) gets a score near 0, a confidently labeled
point gets a score near -1.
"""

from dataclasses import dataclass, field

import numpy as np

from .datasets import nearest_rank_percentile
from .errors import EmptyUnlabeledSet

__all__ = ["AcquisitionScores", "TauSchedule", "score_norm", "score_margin",
           "policy_argmax", "policy_kde_filtered", "policy_proportional",
           "policy_random", "proportional_probabilities"]

NORM_UNCERTAINTY = "norm"
MARGIN_UNCERTAINTY = "margin"
RANDOM_KIND = "random"


@dataclass(frozen=True)
class AcquisitionScores:
    """Scores over the current unlabeled set, higher = query it."""

    indices: np.ndarray
    values: np.ndarray
    kind: str

    def __post_init__(self):
        object.__setattr__(self, "indices", np.asarray(self.indices, dtype=np.int64))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))
        if self.indices.shape != self.values.shape:
            raise ValueError("indices and values must align")

    def as_dict(self):
        return {int(i): float(v) for i, v in zip(self.indices, self.values)}

    def to_csv(self, path):
        """Write an (index, score) snapshot for heatmap rendering."""
        with open(path, "w", encoding="ascii") as f:
            f.write("index,score\n")
            for i, v in zip(self.indices, self.values):
                f.write(f"{i},{float(v)!r}\n")


@dataclass(frozen=True)
class TauSchedule:
    """Geometric decay tau_n = tau0 * mu^n, cut to zero from n = 2K on.

    mu = (eps / tau0)^(1/(2K)) so that tau reaches the floor eps after 2K
    steps; K is the user's cluster-count handle on how aggressively the run
    moves from exploration to exploitation.
    """

    tau0: float
    K: int
    eps: float = 1e-9
    mu: float = field(init=False)

    def __post_init__(self):
        if self.tau0 <= 0:
            raise ValueError("tau0 must be positive")
        if self.K < 1:
            raise ValueError("K must be at least 1")
        object.__setattr__(self, "mu", (self.eps / self.tau0) ** (1.0 / (2 * self.K)))

    def tau_at(self, n):
        if n < 0:
            raise ValueError("iteration must be nonnegative")
        if n >= 2 * self.K:
            return 0.0
        return self.tau0 * self.mu ** n


def _unlabeled_scores(node_fn, unlabeled):
    unlabeled = np.asarray(unlabeled, dtype=np.int64).ravel()
    u = getattr(node_fn, "u", node_fn)
    return unlabeled, u[unlabeled]


def score_norm(node_fn, unlabeled):
    """Negated Euclidean norm of the output vector at each unlabeled point."""
    idx, rows = _unlabeled_scores(node_fn, unlabeled)
    return AcquisitionScores(indices=idx,
                             values=-np.linalg.norm(rows, axis=1),
                             kind=NORM_UNCERTAINTY)


def score_margin(node_fn, unlabeled):
    """Negated gap between the largest and second-largest output entries."""
    idx, rows = _unlabeled_scores(node_fn, unlabeled)
    if rows.shape[1] < 2:
        raise ValueError("margin needs at least 2 classes")
    top2 = -np.partition(-rows, 1, axis=1)[:, :2]
    return AcquisitionScores(indices=idx,
                             values=-(top2[:, 0] - top2[:, 1]),
                             kind=MARGIN_UNCERTAINTY)


def policy_argmax(scores):
    """Index with the highest score; ties go to the lowest index."""
    if len(scores.indices) == 0:
        raise EmptyUnlabeledSet("no candidates to query")
    order = np.argsort(scores.indices, kind="stable")
    idx = scores.indices[order]
    vals = scores.values[order]
    return int(idx[np.argmax(vals)])


def policy_kde_filtered(scores, kde, percentile=10.0):
    """Argmax over candidates at or above the density threshold.

    The threshold is the nearest-rank percentile of the KDE over the whole
    dataset; candidates strictly below it are dropped as outliers. If that
    empties the candidate set, falls back to the unrestricted argmax.

    Parameters
    ----------
    scores : AcquisitionScores
    kde : KdeEstimate or numpy array (N,)
        Density values for all N points.
    percentile : float (optional), default=10.0
    """
    if len(scores.indices) == 0:
        raise EmptyUnlabeledSet("no candidates to query")
    values = np.asarray(getattr(kde, "values", kde), dtype=np.float64)
    threshold = nearest_rank_percentile(values, percentile)
    keep = values[scores.indices] >= threshold
    if not np.any(keep):
        return policy_argmax(scores)
    return policy_argmax(AcquisitionScores(indices=scores.indices[keep],
                                           values=scores.values[keep],
                                           kind=scores.kind))


def proportional_probabilities(scores, Khat):
    """Softmax selection probabilities used by the proportional policy.

    Scores are shifted to s = score - min(score) so the temperature formula
    is well defined under the negated-score convention. With M = max s and
    Phi the nearest-rank 100(1 - 1/Khat) percentile of s, the temperature is
    T = max(eps_o, (M - Phi)/M), where eps_o = M / (ln(E_max) - ln |U|)
    guards exp overflow (E_max = largest finite float64). M = 0 gives T = 1,
    i.e. the uniform distribution.

    Returns
    -------
    p : numpy array aligned with scores.indices, summing to 1.
    """
    if Khat < 1:
        raise ValueError("Khat must be at least 1")
    s = scores.values - scores.values.min()
    m = s.max()
    if m == 0.0:
        return np.full(len(s), 1.0 / len(s))
    phi = nearest_rank_percentile(s, 100.0 * (1.0 - 1.0 / Khat))
    t0 = (m - phi) / m
    eps_o = m / (np.log(np.finfo(np.float64).max) - np.log(len(s)))
    temp = max(eps_o, t0)
    w = np.exp((s - m) / temp)
    return w / w.sum()


def policy_proportional(scores, Khat, rng):
    """Draw one candidate with probability proportional to exp(score / T)."""
    if len(scores.indices) == 0:
        raise EmptyUnlabeledSet("no candidates to query")
    p = proportional_probabilities(scores, Khat)
    return int(rng.choice(scores.indices, p=p))


def policy_random(unlabeled, rng):
    """Uniform draw over the unlabeled set."""
    unlabeled = np.asarray(unlabeled, dtype=np.int64).ravel()
    if unlabeled.size == 0:
        raise EmptyUnlabeledSet("no candidates to query")
    return int(rng.choice(unlabeled))
