"""Space-filling initial designs: Latin hypercube sampling with a maximin pick.

The construction is best-of-N random cell-centered Latin hypercubes: each
design places one point at the center of a random cell per axis slab, and the
design maximizing the minimum pairwise distance wins. Cell-centered placement
keeps the randomness down to the per-axis permutations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

from .problem import BoxDomain


@dataclass(frozen=True)
class DoeDesign:
    """A design of ``m`` points plus the minimum pairwise distance achieved."""

    points: np.ndarray
    criterion_value: float


def _cell_centered_lhs(m: int, domain: BoxDomain, rng: np.random.Generator) -> np.ndarray:
    u = np.empty((m, domain.dim))
    for j in range(domain.dim):
        u[:, j] = (rng.permutation(m) + 0.5) / m
    return domain.from_unit(u)


def _min_pairwise_distance(points: np.ndarray) -> float:
    if points.shape[0] < 2:
        return float("inf")
    return float(pdist(points).min())


def latin_hypercube_maximin(
    m: int,
    domain: BoxDomain,
    rng: np.random.Generator,
    n_restarts: int = 100,
    return_candidates: bool = False,
):
    """Best of ``n_restarts`` random Latin hypercube designs of size ``m``.

    Returns the design with the largest minimum pairwise Euclidean distance
    (``criterion_value``; +inf for m=1, which has no pairs). Deterministic
    given the generator state. With ``return_candidates`` the full list of
    generated designs is returned as well, for inspecting the best-of pick.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if n_restarts < 1:
        raise ValueError("n_restarts must be >= 1")
    best = None
    candidates = [] if return_candidates else None
    for _ in range(n_restarts):
        points = _cell_centered_lhs(m, domain, rng)
        design = DoeDesign(points, _min_pairwise_distance(points))
        if candidates is not None:
            candidates.append(design)
        if best is None or design.criterion_value > best.criterion_value:
            best = design
    if return_candidates:
        return best, candidates
    return best
