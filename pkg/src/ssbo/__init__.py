"""Sequential surrogate-based optimization for expensive black-box problems."""

from .bench import BatchConfig, BatchSummary, export_history, export_rejects, export_summary, run_batch
from .driver import RunConfig, RunRecord, run, select_incumbent
from .infill import (
    InfillCandidate,
    Incumbent,
    ReducedInterval,
    Sample,
    SampleSet,
    accept_candidate,
    criterion_global,
    criterion_local,
    criterion_uniform,
    reduced_interval,
)
from .problems import CountingEvaluator, ProblemSpec, make_problem
from .solvers import BoxProblem, SolverSettings, candidate_search, ga_minimize, local_minimize, penalized_value
from .space import DesignSpace, denormalize, lhs_sample, min_distance, normalize
from .surrogate import KernelKind, RbfModel, SurrogateBundle, build_bundle, fit, loocv_error, predict, tune_shape

__all__ = [
    "BatchConfig",
    "BatchSummary",
    "BoxProblem",
    "CountingEvaluator",
    "DesignSpace",
    "InfillCandidate",
    "Incumbent",
    "KernelKind",
    "ProblemSpec",
    "RbfModel",
    "ReducedInterval",
    "RunConfig",
    "RunRecord",
    "Sample",
    "SampleSet",
    "SolverSettings",
    "SurrogateBundle",
    "accept_candidate",
    "build_bundle",
    "candidate_search",
    "criterion_global",
    "criterion_local",
    "criterion_uniform",
    "denormalize",
    "export_history",
    "export_rejects",
    "export_summary",
    "fit",
    "ga_minimize",
    "lhs_sample",
    "local_minimize",
    "loocv_error",
    "make_problem",
    "min_distance",
    "normalize",
    "penalized_value",
    "predict",
    "reduced_interval",
    "run",
    "run_batch",
    "select_incumbent",
    "tune_shape",
]

__version__ = "0.1.0"
