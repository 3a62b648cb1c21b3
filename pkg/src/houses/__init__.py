"""Surrogate-assisted hyperparameter optimization on the unit cube.

A Gaussian-process surrogate with a non-stationary, input-warped kernel
anchored at the incumbent best, searched by an importance-weighted
evolutionary strategy, plus random-search and stationary-kernel
baselines and a benchmark harness.
"""

from .acquisition import AcquisitionSpec, argbest, score
from .evolution import ESConfig, grid_select, mutation_probabilities, polynomial_mutation, propose
from .fanova import ImportanceReport, MarginalCurve, importance, marginal_curve
from .gp import ConditioningError, DataError, GPModel, build_model, fit, log_marginal_likelihood, predict
from .kernels import (
    KernelParams,
    build_cov_matrix,
    kernel_ard_se,
    kernel_houses,
    kernel_relative_distance,
    warp_kumaraswamy,
)
from .objectives import (
    BUILTINS,
    ObjectiveError,
    ObjectiveSpec,
    builtin_objective,
    default_space,
    eval_builtin,
    eval_mlp_synth,
    metrics,
)
from .external import ExternalObjective, make_objective
from .optimizer import RunConfig, RunState, resume, run, run_random, update_anchor
from .runlog import EvaluationRecord, ReplayError, RunLog, read_log
from .space import Configuration, ParamSpec, SearchSpace, lhs_sample, load_space, save_space

__version__ = "0.1.0"

__all__ = [
    "AcquisitionSpec", "argbest", "score",
    "ESConfig", "grid_select", "mutation_probabilities", "polynomial_mutation", "propose",
    "ImportanceReport", "MarginalCurve", "importance", "marginal_curve",
    "ConditioningError", "DataError", "GPModel", "build_model", "fit",
    "log_marginal_likelihood", "predict",
    "KernelParams", "build_cov_matrix", "kernel_ard_se", "kernel_houses",
    "kernel_relative_distance", "warp_kumaraswamy",
    "BUILTINS", "ObjectiveError", "ObjectiveSpec", "builtin_objective", "default_space",
    "eval_builtin", "eval_mlp_synth", "metrics",
    "ExternalObjective", "make_objective",
    "RunConfig", "RunState", "resume", "run", "run_random", "update_anchor",
    "EvaluationRecord", "ReplayError", "RunLog", "read_log",
    "Configuration", "ParamSpec", "SearchSpace", "lhs_sample", "load_space", "save_space",
    "__version__",
]
