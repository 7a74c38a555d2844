"""Sequential active-learning driver: solve, score, select, label, log."""

import time
from dataclasses import dataclass, field

import numpy as np

from .acquisition import (MARGIN_UNCERTAINTY, NORM_UNCERTAINTY, RANDOM_KIND,
                          TauSchedule, policy_argmax, policy_kde_filtered,
                          policy_proportional, policy_random, score_margin,
                          score_norm)
from .datasets import knn_kde
from .errors import OracleOutOfRange
from .graphs import build_knn_graph
from .reweighting import solve_gamma
from .solver import LabelState, classify, solve_pwll

__all__ = ["ExperimentConfig", "IterationRecord", "IterationLog", "run_experiment",
           "accuracy", "cluster_proportion", "choose_initial_labels", "ground_truth_oracle"]

CSV_HEADER = "iteration,query_index,class,accuracy,cluster_proportion,tau,ms"


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything that defines one active-learning run besides the seed."""

    acquisition: str = NORM_UNCERTAINTY          # norm | margin | random
    policy: str = "argmax"                       # argmax | kde | proportional | random
    tau_mode: str = "schedule"                   # fixed | schedule | zero
    tau: float = 16.0                            # fixed-mode value
    tau0: float = 16.0                           # schedule initial value
    K: int = 24                                  # schedule decay-length knob
    n_queries: int = 100
    seeds: tuple = (0,)
    initial_labeling: str = "one-per-class"      # one-per-class | one-total | explicit
    initial_indices: tuple = ()
    k: int = 10                                  # graph neighbors
    kde_k: int = 10                              # KDE neighbor order (kde policy)
    khat: float = 8.0                            # proportional-policy cluster handle

    def __post_init__(self):
        if self.n_queries < 1:
            raise ValueError("n_queries must be at least 1")
        if self.tau_mode == "schedule" and self.tau0 <= 0:
            raise ValueError("schedule mode needs tau0 > 0")
        if self.tau_mode == "fixed" and self.tau < 0:
            raise ValueError("fixed tau must be nonnegative")
        if self.acquisition not in (NORM_UNCERTAINTY, MARGIN_UNCERTAINTY, RANDOM_KIND):
            raise ValueError(f"unknown acquisition {self.acquisition!r}")
        if self.policy not in ("argmax", "kde", "proportional", "random"):
            raise ValueError(f"unknown policy {self.policy!r}")
        if self.tau_mode not in ("fixed", "schedule", "zero"):
            raise ValueError(f"unknown tau_mode {self.tau_mode!r}")
        if self.initial_labeling not in ("one-per-class", "one-total", "explicit"):
            raise ValueError(f"unknown initial labeling {self.initial_labeling!r}")

    def tau_at(self, n):
        if self.tau_mode == "fixed":
            return self.tau
        if self.tau_mode == "zero":
            return 0.0
        return TauSchedule(tau0=self.tau0, K=self.K).tau_at(n)


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    query_index: int          # -1 on the initial row
    observed_class: int       # -1 on the initial row
    accuracy: float
    cluster_proportion: float
    tau: float
    ms: float


@dataclass
class IterationLog:
    """Per-iteration records of one run; row 0 is the initial labeled state."""

    dataset: str
    acquisition: str
    seed: int
    records: list = field(default_factory=list)

    def final_accuracy(self):
        return self.records[-1].accuracy

    def accuracy_at(self, iteration):
        return self.records[iteration].accuracy

    def cluster_proportion_at(self, iteration):
        return self.records[iteration].cluster_proportion

    def query_indices(self):
        return [r.query_index for r in self.records if r.query_index >= 0]

    def to_csv(self, path):
        with open(path, "w", encoding="ascii") as f:
            f.write(CSV_HEADER + "\n")
            for r in self.records:
                f.write(f"{r.iteration},{r.query_index},{r.observed_class},"
                        f"{r.accuracy!r},{r.cluster_proportion!r},{r.tau!r},"
                        f"{r.ms:.3f}\n")


def accuracy(predictions, dataset, labeled):
    """Fraction of correctly classified points outside the labeled set."""
    mask = np.ones(dataset.n_points, dtype=bool)
    mask[np.asarray(labeled, dtype=np.int64)] = False
    if not np.any(mask):
        return 1.0
    return float(np.mean(predictions[mask] == dataset.true_labels[mask]))


def cluster_proportion(labeled, dataset):
    """Fraction of ground-truth clusters holding at least one labeled point."""
    labeled = np.asarray(labeled, dtype=np.int64)
    hit = len(np.unique(dataset.cluster_ids[labeled]))
    return hit / dataset.n_clusters


def choose_initial_labels(dataset, rule, rng, explicit=()):
    if rule == "one-per-class":
        picks = [int(rng.choice(np.flatnonzero(dataset.true_labels == c)))
                 for c in range(dataset.n_classes)]
        return np.array(picks, dtype=np.int64)
    if rule == "one-total":
        return np.array([int(rng.integers(dataset.n_points))], dtype=np.int64)
    if rule == "explicit":
        if len(explicit) == 0:
            raise ValueError("explicit initial labeling needs indices")
        return np.asarray(explicit, dtype=np.int64)
    raise ValueError(f"unknown initial labeling {rule!r}")


def ground_truth_oracle(dataset):
    """Oracle that looks up the dataset's true label."""
    def oracle(index):
        return int(dataset.true_labels[index])
    return oracle


def _select(config, node_fn, unlabeled, kde, rng):
    if config.acquisition == RANDOM_KIND or config.policy == "random":
        return policy_random(unlabeled, rng), None
    score_fn = score_norm if config.acquisition == NORM_UNCERTAINTY else score_margin
    scores = score_fn(node_fn, unlabeled)
    if config.policy == "argmax":
        return policy_argmax(scores), scores
    if config.policy == "kde":
        return policy_kde_filtered(scores, kde), scores
    return policy_proportional(scores, config.khat, rng), scores


def run_experiment(dataset, config, oracle, seed, graph=None, snapshot_dir=None):
    """Run one seeded active-learning trial and record its trajectory.

    Each iteration recomputes gamma for the current labeled set, solves the
    tau-shifted system (warm-started from the previous solution), evaluates
    accuracy over the unlabeled points and the cluster proportion, then the
    next query is selected by the configured policy and labeled through the
    oracle. Row n of the log describes the state after n queries; its tau is
    the value used for that solve, and queries are pairwise distinct.

    Parameters
    ----------
    dataset : Dataset
    config : ExperimentConfig
    oracle : callable index -> class
        Ground-truth lookup, a recorded list, or a human relay.
    seed : int
        Controls the initial labeled set and any policy randomness.
    graph : SimilarityGraph (optional)
        Prebuilt graph; built from config.k when omitted.
    snapshot_dir : path-like (optional)
        Directory for per-iteration (index, score) CSV snapshots.

    Returns
    -------
    log : IterationLog
    """
    rng = np.random.default_rng(seed)
    if graph is None:
        graph = build_knn_graph(dataset.features, config.k)
    kde = knn_kde(dataset.features, config.kde_k) if config.policy == "kde" else None

    initial = choose_initial_labels(dataset, config.initial_labeling, rng,
                                    config.initial_indices)
    labels = LabelState(labeled=initial,
                        classes=[_ask(oracle, i, dataset.n_classes) for i in initial],
                        n_classes=dataset.n_classes)

    log = IterationLog(dataset=dataset.name, acquisition=config.acquisition, seed=seed)
    all_idx = np.arange(dataset.n_points)
    node_fn = None
    weights = None
    for n in range(config.n_queries + 1):
        t0 = time.perf_counter()
        query, observed = -1, -1
        if n > 0:
            unlabeled = np.setdiff1d(all_idx, labels.labeled)
            query, scores = _select(config, node_fn, unlabeled, kde, rng)
            if snapshot_dir is not None and scores is not None:
                scores.to_csv(f"{snapshot_dir}/acq_{n:04d}.csv")
            observed = _ask(oracle, query, dataset.n_classes)
            labels = labels.with_label(query, observed)
        weights = solve_gamma(graph, labels.labeled,
                              x0=None if weights is None else weights.raw)
        node_fn = solve_pwll(graph, weights, labels, config.tau_at(n),
                             warm_start=node_fn)
        ms = (time.perf_counter() - t0) * 1e3
        log.records.append(IterationRecord(
            iteration=n, query_index=query, observed_class=observed,
            accuracy=accuracy(classify(node_fn), dataset, labels.labeled),
            cluster_proportion=cluster_proportion(labels.labeled, dataset),
            tau=config.tau_at(n), ms=ms))
    return log


def _ask(oracle, index, n_classes):
    cls = int(oracle(int(index)))
    if not 0 <= cls < n_classes:
        raise OracleOutOfRange(f"oracle returned {cls} for index {index}")
    return cls
