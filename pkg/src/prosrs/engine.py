"""Optimization drivers: the main surrogate loop and a random-search baseline.

The main loop bootstraps from a space-filling design, then repeats: fit the
weighted RBF surrogate on the current node's data, propose a batch, evaluate
it in one parallel barrier, update the exploitation schedule, and manage the
zoom tree (zoom in when the spread parameter crosses its critical value,
restart from a fresh design when the would-be child is finer than the
resolution threshold, occasionally zoom out). Runs are bit-reproducible given
the seed and a deterministic evaluator.

Evaluators own the parallelism: they take a (k, d) batch and return k values
in order. Per-iteration wall time is split into algorithm time and the
evaluation barrier, so algorithm cost can be profiled independently of the
objective's cost.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .doe import latin_hypercube_maximin
from .problem import (
    EvalDataset,
    EvaluationError,
    ExploitState,
    Objective,
    RunConfig,
    derive_streams,
)
from .srs import best_fit_index, generate_candidates, select_batch, weight_pattern
from .surrogate import CvConfig, fit_rbf
from .zoomtree import ZoomTree, effective_n, restart_condition, update_state

EVENT_DOE = "doe"
EVENT_NORMAL = "normal"
EVENT_ZOOM_IN = "zoom_in"
EVENT_ZOOM_OUT = "zoom_out"
EVENT_RESTART = "restart"


@dataclass(frozen=True)
class IterationLog:
    """One row per evaluated batch.

    ``iteration`` is 0 for the initial design batches (which do not consume
    the iteration budget) and the 1-based loop index otherwise; design batches
    re-evaluated after a restart do consume the budget and carry their loop
    index with event="doe". ``algo_time_s`` excludes the evaluation barrier,
    which is reported separately as ``eval_time_s``.
    """

    iteration: int
    event: str
    node_id: int
    zoom_level: int
    state_snapshot: ExploitState
    proposed_x: np.ndarray
    proposed_y: np.ndarray
    best_y_so_far: float
    algo_time_s: float
    eval_time_s: float


@dataclass(frozen=True)
class RunResult:
    """Outcome of a run: the evaluated pair with the lowest response, the
    per-batch logs, and the total evaluation count."""

    x_best: np.ndarray
    y_best: float
    logs: list
    n_evaluations: int
    config_echo: RunConfig

    def best_trajectory(self) -> tuple[np.ndarray, np.ndarray]:
        """Cumulative best point and response after each logged batch."""
        return best_trajectory(self.logs)


def best_trajectory(logs) -> tuple[np.ndarray, np.ndarray]:
    """Cumulative best (point, response) after each log row."""
    xs, ys = [], []
    best_x, best_y = None, np.inf
    for log in logs:
        i = int(np.argmin(log.proposed_y))
        if log.proposed_y[i] < best_y:
            best_y = float(log.proposed_y[i])
            best_x = log.proposed_x[i]
        xs.append(best_x)
        ys.append(best_y)
    return np.asarray(xs), np.asarray(ys)


def is_failure(proposed_y, best_prior_y: float) -> bool:
    """True iff the batch did not strictly improve the prior best response."""
    proposed_y = np.asarray(proposed_y, dtype=float)
    if proposed_y.size == 0:
        raise ValueError("proposed_y must be nonempty")
    return bool(proposed_y.min() >= best_prior_y)


def serial_evaluator(objective: Objective) -> Callable:
    """Evaluate a batch one point at a time through ``objective.eval``."""

    def evaluate(X):
        return np.array([objective.eval(x) for x in np.atleast_2d(X)], dtype=float)

    return evaluate


def threaded_evaluator(objective: Objective, max_workers: int | None = None) -> Callable:
    """Evaluate a batch concurrently; order of results matches the batch."""
    from concurrent.futures import ThreadPoolExecutor

    def evaluate(X):
        X = np.atleast_2d(X)
        with ThreadPoolExecutor(max_workers=max_workers or len(X)) as pool:
            return np.fromiter(pool.map(objective.eval, X), dtype=float, count=len(X))

    return evaluate


class _Recorder:
    """Tracks the global best, the log list, and evaluation counts."""

    def __init__(self):
        self.logs = []
        self.best_x = None
        self.best_y = np.inf
        self.n_evaluations = 0

    def evaluate(self, evaluator, X) -> tuple[np.ndarray, float]:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        t0 = time.perf_counter()
        try:
            y = evaluator(X)
        except Exception as exc:
            raise EvaluationError(f"evaluator raised: {exc!r}", logs=self.logs) from exc
        elapsed = time.perf_counter() - t0
        y = np.atleast_1d(np.asarray(y, dtype=float))
        if y.shape != (X.shape[0],):
            raise EvaluationError(
                f"evaluator returned {y.shape[0] if y.ndim else 0} values "
                f"for a batch of {X.shape[0]}",
                logs=self.logs,
            )
        bad = np.flatnonzero(~np.isfinite(y))
        if bad.size:
            raise EvaluationError(
                f"evaluator returned non-finite value {y[bad[0]]} at point {X[bad[0]]}",
                logs=self.logs,
            )
        self.n_evaluations += int(y.size)
        i = int(np.argmin(y))
        if y[i] < self.best_y:
            self.best_y = float(y[i])
            self.best_x = X[i].copy()
        return y, elapsed

    def log(self, **fields):
        self.logs.append(IterationLog(best_y_so_far=self.best_y, **fields))

    def result(self, config: RunConfig) -> RunResult:
        return RunResult(
            x_best=self.best_x,
            y_best=self.best_y,
            logs=self.logs,
            n_evaluations=self.n_evaluations,
            config_echo=config,
        )


def _check_setup(objective: Objective, config: RunConfig):
    if objective.dimension != config.dim:
        raise ValueError(
            f"objective dimension {objective.dimension} does not match config dim {config.dim}"
        )


def run_prosrs(
    objective: Objective,
    config: RunConfig,
    evaluator: Callable | None = None,
) -> RunResult:
    """Run the full surrogate optimization loop for ``config.n_iterations``.

    The initial design is evaluated in n_par-sized barrier batches before the
    loop and does not consume the iteration budget; design batches after a
    restart do. Returns the evaluated point with the lowest response over the
    entire run, including evaluations made before any restart.
    """
    _check_setup(objective, config)
    if evaluator is None:
        evaluator = serial_evaluator(objective)
    rngs = derive_streams(config.seed)
    rec = _Recorder()
    domain = objective.domain
    d = config.dim

    def doe_points():
        return latin_hypercube_maximin(config.m_doe, domain, rngs["doe"]).points

    def doe_batches(points):
        return [
            points[i : i + config.n_par] for i in range(0, len(points), config.n_par)
        ]

    # Initial design, outside the iteration budget (iteration = 0).
    tree = None
    next_node_id = 0
    pending = doe_batches(doe_points())
    doe_X, doe_y = [], []
    for batch in pending:
        y, t_eval = rec.evaluate(evaluator, batch)
        doe_X.append(batch)
        doe_y.append(y)
        rec.log(
            iteration=0,
            event=EVENT_DOE,
            node_id=next_node_id,
            zoom_level=0,
            state_snapshot=config.s_init,
            proposed_x=np.atleast_2d(batch),
            proposed_y=y,
            algo_time_s=0.0,
            eval_time_s=t_eval,
        )
    tree = ZoomTree(
        EvalDataset(np.vstack(doe_X), np.concatenate(doe_y)),
        domain,
        config,
        first_node_id=next_node_id,
    )
    next_node_id = tree.next_node_id
    pending = []

    proposal_count = 0  # 0-based count of SRS proposal steps (weight alternation)
    for iteration in range(1, config.n_iterations + 1):
        if pending:
            # Re-bootstrap after a restart: these batches consume the budget.
            batch = pending.pop(0)
            y, t_eval = rec.evaluate(evaluator, batch)
            doe_X.append(batch)
            doe_y.append(y)
            if not pending:
                tree = ZoomTree(
                    EvalDataset(np.vstack(doe_X), np.concatenate(doe_y)),
                    domain,
                    config,
                    first_node_id=next_node_id,
                )
                next_node_id = tree.next_node_id
            rec.log(
                iteration=iteration,
                event=EVENT_DOE,
                node_id=next_node_id if tree is None else tree.root.node_id,
                zoom_level=0,
                state_snapshot=config.s_init,
                proposed_x=np.atleast_2d(batch),
                proposed_y=y,
                algo_time_s=0.0,
                eval_time_s=t_eval,
            )
            continue

        node = tree.current
        state = node.state

        t0 = time.perf_counter()
        cv = CvConfig(fold_seed=int(rngs["cv"].integers(0, 2**63)))
        model = fit_rbf(node.data, node.omega, state.gamma, cv)
        candidates = generate_candidates(
            node.data,
            node.omega,
            state,
            model,
            config.n_candidates_per_dim * d,
            rngs["candidates"],
        )
        pattern = weight_pattern(config.n_par, proposal_count)
        X_new = select_batch(candidates, model, node.data.X, pattern)
        algo_time = time.perf_counter() - t0
        proposal_count += 1

        best_prior = float(node.data.y.min())
        y_new, t_eval = rec.evaluate(evaluator, X_new)
        failed = is_failure(y_new, best_prior)

        t0 = time.perf_counter()
        tree.record_batch(X_new, y_new)
        update_state(node, effective_n(node.data, node.omega), failed, config)

        event = EVENT_NORMAL
        restarted = False
        if node.state.sigma < config.sigma_crit:
            x_star = node.data.X[best_fit_index(node.data, model)]
            child = tree.zoom_in(x_star, config)
            next_node_id = tree.next_node_id
            if restart_condition(child, domain, config):
                event = EVENT_RESTART
                restarted = True
                pending = doe_batches(doe_points())
                doe_X, doe_y = [], []
                tree = None
            else:
                event = EVENT_ZOOM_IN
        if not restarted and tree.current.parent is not None:
            if tree.maybe_zoom_out(rngs["zoomout"]):
                event = EVENT_ZOOM_OUT
        algo_time += time.perf_counter() - t0

        rec.log(
            iteration=iteration,
            event=event,
            node_id=node.node_id,
            zoom_level=node.zoom_level,
            state_snapshot=state,
            proposed_x=X_new,
            proposed_y=y_new,
            algo_time_s=algo_time,
            eval_time_s=t_eval,
        )

    return rec.result(config)


def run_random_search(
    objective: Objective,
    config: RunConfig,
    evaluator: Callable | None = None,
) -> RunResult:
    """Baseline: each iteration evaluates n_par uniform points (no design)."""
    _check_setup(objective, config)
    if evaluator is None:
        evaluator = serial_evaluator(objective)
    rngs = derive_streams(config.seed)
    rec = _Recorder()
    for iteration in range(1, config.n_iterations + 1):
        t0 = time.perf_counter()
        X = objective.domain.sample_uniform(config.n_par, rngs["candidates"])
        algo_time = time.perf_counter() - t0
        y, t_eval = rec.evaluate(evaluator, X)
        rec.log(
            iteration=iteration,
            event=EVENT_NORMAL,
            node_id=0,
            zoom_level=0,
            state_snapshot=config.s_init,
            proposed_x=X,
            proposed_y=y,
            algo_time_s=algo_time,
            eval_time_s=t_eval,
        )
    return rec.result(config)
