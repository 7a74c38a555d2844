"""Graph-based sequential active learning with reweighted Laplace learning.

The engine builds a kNN similarity graph, learns a per-node reweighting from
a graph Poisson equation sourced at the labeled points, solves the
tau-regularized reweighted Laplace system for class scores, and drives a
sequential query loop with uncertainty-based acquisition functions. A 1D
finite-difference verifier checks the continuum exploration/exploitation
bounds, and an HTTP service exposes the loop to a human annotator.
"""

from .acquisition import (AcquisitionScores, TauSchedule, policy_argmax,
                          policy_kde_filtered, policy_proportional, policy_random,
                          score_margin, score_norm)
from .continuum import (IntervalProblem, IntervalSolution, TrapezoidDensity,
                        check_exploration_condition, check_general_1d_bounds,
                        midpoint_acquisition_constant, solve_bvp)
from .datasets import Dataset, KdeEstimate, gen_blobs, gen_box, knn_kde, relabel_mod_k
from .graphs import SimilarityGraph, SparseOperator, assemble_laplacian, build_knn_graph
from .loop import (ExperimentConfig, IterationLog, accuracy, cluster_proportion,
                   ground_truth_oracle, run_experiment)
from .reweighting import NodeWeights, solve_gamma
from .solver import LabelState, NodeFunction, cg_solve, classify, solve_pwll

__version__ = "0.1.0"

__all__ = [
    "AcquisitionScores", "TauSchedule", "policy_argmax", "policy_kde_filtered",
    "policy_proportional", "policy_random", "score_margin", "score_norm",
    "IntervalProblem", "IntervalSolution", "TrapezoidDensity",
    "check_exploration_condition", "check_general_1d_bounds",
    "midpoint_acquisition_constant", "solve_bvp",
    "Dataset", "KdeEstimate", "gen_blobs", "gen_box", "knn_kde", "relabel_mod_k",
    "SimilarityGraph", "SparseOperator", "assemble_laplacian", "build_knn_graph",
    "ExperimentConfig", "IterationLog", "accuracy", "cluster_proportion",
    "ground_truth_oracle", "run_experiment",
    "NodeWeights", "solve_gamma",
    "LabelState", "NodeFunction", "cg_solve", "classify", "solve_pwll",
]
