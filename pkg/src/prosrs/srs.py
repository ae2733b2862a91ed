"""Stochastic response surface proposals: candidate generation and selection.

Each iteration draws a pool of candidates inside the current domain — a
mixture of uniform draws (Type I) and Gaussian perturbations of the current
surrogate-best point (Type II) — then picks a batch by blending a surrogate
response score against a min-distance exploration score, one pick per weight
in the pattern.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .problem import BoxDomain, EvalDataset, ExploitState, clip_to_domain
from .surrogate import RbfSurrogate, predict_batch

TYPE_I = 0  # uniform over the domain
TYPE_II = 1  # Gaussian perturbation around the surrogate-best point


@dataclass(frozen=True)
class CandidateSet:
    """Candidate pool with per-point type tags (TYPE_I or TYPE_II)."""

    points: np.ndarray
    type_tags: np.ndarray

    def __post_init__(self):
        points = np.atleast_2d(np.asarray(self.points, dtype=float))
        tags = np.asarray(self.type_tags, dtype=np.uint8)
        if tags.shape != (points.shape[0],):
            raise ValueError("one type tag per candidate required")
        points.setflags(write=False)
        tags.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "type_tags", tags)

    def __len__(self) -> int:
        return int(self.points.shape[0])


@dataclass(frozen=True)
class WeightPattern:
    """Per-slot response-vs-distance tradeoff weights, each in [0.3, 1]."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if w.size < 1:
            raise ValueError("weight pattern must be nonempty")
        if np.any(w < 0.3) or np.any(w > 1.0):
            raise ValueError("weights must lie in [0.3, 1]")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return int(self.weights.size)


def weight_pattern(n_par: int, iteration_index: int = 0) -> WeightPattern:
    """Weights for a batch of ``n_par`` proposals.

    For n_par >= 2 these are the n_par equally spaced values from 0.3 to 1.0
    inclusive. For n_par = 1 the single weight alternates between iterations:
    0.3 on even ``iteration_index``, 1.0 on odd.
    """
    if n_par < 1:
        raise ValueError("n_par must be >= 1")
    if n_par == 1:
        return WeightPattern(np.array([0.3 if iteration_index % 2 == 0 else 1.0]))
    return WeightPattern(np.linspace(0.3, 1.0, n_par))


def best_fit_index(data: EvalDataset, model: RbfSurrogate) -> int:
    """Index of the data point with the lowest surrogate value (ties: lowest)."""
    if len(data) == 0:
        raise ValueError("dataset is empty")
    return int(np.argmin(predict_batch(model, data.X)))


def generate_candidates(
    data: EvalDataset,
    omega: BoxDomain,
    state: ExploitState,
    model: RbfSurrogate,
    t: int,
    rng: np.random.Generator,
) -> CandidateSet:
    """Draw ``t`` candidates in ``omega``: a Type I fraction of
    floor(10p)/10 uniform over the domain, the rest Type II Gaussian
    perturbations of the surrogate-best data point with per-dimension
    standard deviation sigma * side_length, clamped back into the domain."""
    if t < 1:
        raise ValueError("t must be >= 1")
    n_uniform = int(np.floor(np.floor(10.0 * state.p) / 10.0 * t + 0.5))
    n_gauss = t - n_uniform

    uniform_pts = omega.sample_uniform(n_uniform, rng)

    x_star = data.X[best_fit_index(data, model)]
    spread = state.sigma * omega.side_lengths
    gauss_pts = x_star + rng.normal(0.0, 1.0, size=(n_gauss, omega.dim)) * spread
    gauss_pts = clip_to_domain(gauss_pts, omega)

    points = np.vstack([uniform_pts, gauss_pts])
    tags = np.concatenate(
        [np.full(n_uniform, TYPE_I, np.uint8), np.full(n_gauss, TYPE_II, np.uint8)]
    )
    return CandidateSet(points, tags)


def select_batch(
    candidates: CandidateSet,
    model: RbfSurrogate,
    evaluated,
    pattern: WeightPattern,
    return_indices: bool = False,
):
    """Pick one candidate per weight, scoring response against spread.

    For each weight w, over the remaining pool: the response score is the
    min-max normalized surrogate value, the distance score is the min-max
    normalized negated distance to the nearest point among the evaluated
    points and the proposals already picked (both scores identically 0 when
    their range is degenerate). The candidate minimizing
    w * response + (1 - w) * distance is selected (ties: lowest index),
    removed from the pool, and the nearest-distances are refreshed.
    """
    evaluated = np.atleast_2d(np.asarray(evaluated, dtype=float))
    if len(candidates) == 0 or evaluated.shape[0] == 0:
        raise ValueError("candidates and evaluated points must be nonempty")
    n_par = len(pattern)
    if len(candidates) < n_par:
        raise ValueError(
            f"pool of {len(candidates)} candidates cannot fill {n_par} slots"
        )

    points = candidates.points
    g = predict_batch(model, points)
    dmin = _kernels.min_dists(points, evaluated)
    active = np.ones(len(candidates), dtype=bool)
    picked = []
    for w in pattern.weights:
        idx = np.flatnonzero(active)
        g_pool = g[idx]
        d_pool = dmin[idx]

        g_lo, g_hi = g_pool.min(), g_pool.max()
        if g_hi > g_lo:
            score_resp = (g_pool - g_lo) / (g_hi - g_lo)
        else:
            score_resp = np.zeros_like(g_pool)

        d_lo, d_hi = d_pool.min(), d_pool.max()
        if d_hi > d_lo:
            score_dist = (d_hi - d_pool) / (d_hi - d_lo)
        else:
            score_dist = np.zeros_like(d_pool)

        choice = idx[int(np.argmin(w * score_resp + (1.0 - w) * score_dist))]
        picked.append(int(choice))
        active[choice] = False
        dmin = _kernels.update_min_dists(dmin, points, points[choice])

    batch = points[picked]
    if return_indices:
        return batch, picked
    return batch
