"""Parallel surrogate optimization toolkit.

Minimizes expensive noisy black-box functions over box domains using weighted
multiquadric surrogates, stochastic-response-surface batch proposals, and a
tree of progressively zoomed domains, plus a noisy benchmark suite and a CLI
for running experiments.
"""

from . import _kernels
from .benchmarks import (
    BENCHMARK_NAMES,
    BenchmarkProblem,
    NoisyBatchEvaluator,
    benchmark_objective,
    make_benchmark,
    noisy_eval,
)
from .doe import DoeDesign, latin_hypercube_maximin
from .engine import (
    IterationLog,
    RunResult,
    is_failure,
    run_prosrs,
    run_random_search,
    serial_evaluator,
    threaded_evaluator,
)
from .problem import (
    BoxDomain,
    EvalDataset,
    EvaluationError,
    ExploitState,
    Objective,
    RunConfig,
    clip_to_domain,
    default_config,
    derive_streams,
)
from .srs import (
    CandidateSet,
    WeightPattern,
    generate_candidates,
    select_batch,
    weight_pattern,
)
from .surrogate import (
    CvConfig,
    RbfSurrogate,
    fit_rbf,
    predict,
    predict_batch,
    relative_l2_error,
)
from .zoomtree import (
    ZoomNode,
    ZoomTree,
    effective_n,
    maybe_zoom_out,
    restart_condition,
    update_state,
    zoom_in,
)

__version__ = "0.1.0"

__all__ = [
    "BENCHMARK_NAMES",
    "BenchmarkProblem",
    "BoxDomain",
    "CandidateSet",
    "CvConfig",
    "DoeDesign",
    "EvalDataset",
    "EvaluationError",
    "ExploitState",
    "IterationLog",
    "NoisyBatchEvaluator",
    "Objective",
    "RbfSurrogate",
    "RunConfig",
    "RunResult",
    "WeightPattern",
    "ZoomNode",
    "ZoomTree",
    "benchmark_objective",
    "clip_to_domain",
    "default_config",
    "derive_streams",
    "effective_n",
    "fit_rbf",
    "generate_candidates",
    "is_failure",
    "latin_hypercube_maximin",
    "make_benchmark",
    "maybe_zoom_out",
    "noisy_eval",
    "predict",
    "predict_batch",
    "relative_l2_error",
    "restart_condition",
    "run_prosrs",
    "run_random_search",
    "select_batch",
    "serial_evaluator",
    "threaded_evaluator",
    "update_state",
    "weight_pattern",
    "zoom_in",
]
