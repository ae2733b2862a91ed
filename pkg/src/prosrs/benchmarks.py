"""Noisy optimization benchmark suite.

Twelve standard global-optimization test functions with their usual domains,
each wrapped with additive Gaussian noise of a fixed standard deviation. The
trailing number in a problem name is its dimension. The deterministic part is
exposed as ``true_mean`` for scoring against the noise-free landscape.

All function implementations accept a single point (d,) or a row-stacked
batch (n, d) and are vectorized over the batch.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .problem import BoxDomain, Objective


def _batch(x, d=None):
    X = np.atleast_2d(np.asarray(x, dtype=float))
    if d is not None and X.shape[1] != d:
        raise ValueError(f"expected points of dimension {d}, got {X.shape[1]}")
    return X, np.asarray(x).ndim == 1


def _ret(values, scalar):
    return float(values[0]) if scalar else values


def ackley(x):
    """Ackley function; global minimum 0 at the origin."""
    X, scalar = _batch(x)
    d = X.shape[1]
    s1 = np.sqrt(np.sum(X**2, axis=1) / d)
    s2 = np.sum(np.cos(2.0 * np.pi * X), axis=1) / d
    return _ret(-20.0 * np.exp(-0.2 * s1) - np.exp(s2) + 20.0 + np.e, scalar)


def alpine(x):
    """Alpine function sum |x sin x + 0.1 x|; global minimum 0 at the origin."""
    X, scalar = _batch(x)
    return _ret(np.sum(np.abs(X * np.sin(X) + 0.1 * X), axis=1), scalar)


def griewank(x):
    """Griewank function; global minimum 0 at the origin."""
    X, scalar = _batch(x)
    d = X.shape[1]
    i = np.sqrt(np.arange(1, d + 1, dtype=float))
    return _ret(
        1.0 + np.sum(X**2, axis=1) / 4000.0 - np.prod(np.cos(X / i), axis=1), scalar
    )


def levy(x):
    """Levy function; global minimum 0 at (1, ..., 1)."""
    X, scalar = _batch(x)
    w = 1.0 + (X - 1.0) / 4.0
    head = np.sin(np.pi * w[:, 0]) ** 2
    mid = np.sum(
        (w[:, :-1] - 1.0) ** 2 * (1.0 + 10.0 * np.sin(np.pi * w[:, :-1] + 1.0) ** 2),
        axis=1,
    )
    tail = (w[:, -1] - 1.0) ** 2 * (1.0 + np.sin(2.0 * np.pi * w[:, -1]) ** 2)
    return _ret(head + mid + tail, scalar)


def sum_power(x):
    """Sum of increasing powers sum |x_i|^(i+1); global minimum 0 at the origin."""
    X, scalar = _batch(x)
    d = X.shape[1]
    exps = np.arange(2, d + 2, dtype=float)
    return _ret(np.sum(np.abs(X) ** exps, axis=1), scalar)


def six_hump_camel(x):
    """Six-hump camel function; global minimum about -1.0316 (two minimizers)."""
    X, scalar = _batch(x, 2)
    x1, x2 = X[:, 0], X[:, 1]
    return _ret(
        (4.0 - 2.1 * x1**2 + x1**4 / 3.0) * x1**2
        + x1 * x2
        + (-4.0 + 4.0 * x2**2) * x2**2,
        scalar,
    )


def schaffer_n2(x):
    """Schaffer function N.2; global minimum 0 at the origin."""
    X, scalar = _batch(x, 2)
    x1, x2 = X[:, 0], X[:, 1]
    ssq = x1**2 + x2**2
    return _ret(0.5 + (np.sin(x1**2 - x2**2) ** 2 - 0.5) / (1.0 + 0.001 * ssq) ** 2, scalar)


def dropwave(x):
    """Drop-wave function; global minimum -1 at the origin."""
    X, scalar = _batch(x, 2)
    ssq = np.sum(X**2, axis=1)
    return _ret(-(1.0 + np.cos(12.0 * np.sqrt(ssq))) / (0.5 * ssq + 2.0), scalar)


def goldstein_price(x):
    """Goldstein-Price function; global minimum 3 at (0, -1)."""
    X, scalar = _batch(x, 2)
    x1, x2 = X[:, 0], X[:, 1]
    a = 1.0 + (x1 + x2 + 1.0) ** 2 * (
        19.0 - 14.0 * x1 + 3.0 * x1**2 - 14.0 * x2 + 6.0 * x1 * x2 + 3.0 * x2**2
    )
    b = 30.0 + (2.0 * x1 - 3.0 * x2) ** 2 * (
        18.0 - 32.0 * x1 + 12.0 * x1**2 + 48.0 * x2 - 36.0 * x1 * x2 + 27.0 * x2**2
    )
    return _ret(a * b, scalar)


def rastrigin(x):
    """Rastrigin function; global minimum 0 at the origin."""
    X, scalar = _batch(x)
    d = X.shape[1]
    return _ret(10.0 * d + np.sum(X**2 - 10.0 * np.cos(2.0 * np.pi * X), axis=1), scalar)


_HARTMANN6_ALPHA = np.array([1.0, 1.2, 3.0, 3.2])
_HARTMANN6_A = np.array(
    [
        [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
        [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
        [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
        [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
    ]
)
_HARTMANN6_P = np.array(
    [
        [0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886],
        [0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991],
        [0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650],
        [0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381],
    ]
)


def hartmann6(x):
    """Hartmann 6-D function; global minimum about -3.32237."""
    X, scalar = _batch(x, 6)
    # inner[i, j] = sum_k A[j, k] * (x_i[k] - P[j, k])^2
    diff = X[:, None, :] - _HARTMANN6_P[None, :, :]
    inner = np.sum(_HARTMANN6_A[None, :, :] * diff**2, axis=2)
    return _ret(-np.sum(_HARTMANN6_ALPHA * np.exp(-inner), axis=1), scalar)


_POWER_SUM_B = np.array([8.0, 18.0, 44.0, 114.0])


def power_sum(x):
    """Power-sum function in 4-D; global minimum 0 at permutations of (1,2,2,3)."""
    X, scalar = _batch(x, 4)
    powers = np.stack([np.sum(X ** (k + 1), axis=1) for k in range(4)], axis=1)
    return _ret(np.sum((powers - _POWER_SUM_B) ** 2, axis=1), scalar)


@dataclass(frozen=True)
class BenchmarkProblem:
    """A noisy benchmark: deterministic landscape plus Gaussian noise level."""

    name: str
    dimension: int
    domain: BoxDomain
    noise_std: float
    true_mean: object
    known_min_value: float | None = None
    known_minimizer: np.ndarray | None = None


def _cube(lo, hi, d):
    return BoxDomain(np.full(d, float(lo)), np.full(d, float(hi)))


_HARTMANN6_MINIMIZER = np.array(
    [0.20168952, 0.15001069, 0.47687398, 0.27533243, 0.31165162, 0.65730054]
)

_REGISTRY = {
    "Ackley10": lambda: BenchmarkProblem(
        "Ackley10", 10, _cube(-32.768, 32.768, 10), 1.0, ackley, 0.0, np.zeros(10)
    ),
    "Alpine10": lambda: BenchmarkProblem(
        "Alpine10", 10, _cube(-10, 10, 10), 1.0, alpine, 0.0, np.zeros(10)
    ),
    "Griewank10": lambda: BenchmarkProblem(
        "Griewank10", 10, _cube(-600, 600, 10), 2.0, griewank, 0.0, np.zeros(10)
    ),
    "Levy10": lambda: BenchmarkProblem(
        "Levy10", 10, _cube(-10, 10, 10), 1.0, levy, 0.0, np.ones(10)
    ),
    "SumPower10": lambda: BenchmarkProblem(
        "SumPower10", 10, _cube(-1, 1, 10), 0.05, sum_power, 0.0, np.zeros(10)
    ),
    "SixHumpCamel2": lambda: BenchmarkProblem(
        "SixHumpCamel2",
        2,
        BoxDomain(np.array([-3.0, -2.0]), np.array([3.0, 2.0])),
        0.1,
        six_hump_camel,
        -1.0316284534898774,
        None,  # two symmetric global minimizers
    ),
    "Schaffer2": lambda: BenchmarkProblem(
        "Schaffer2", 2, _cube(-100, 100, 2), 0.02, schaffer_n2, 0.0, np.zeros(2)
    ),
    "Dropwave2": lambda: BenchmarkProblem(
        "Dropwave2", 2, _cube(-5.12, 5.12, 2), 0.02, dropwave, -1.0, np.zeros(2)
    ),
    "GoldsteinPrice2": lambda: BenchmarkProblem(
        "GoldsteinPrice2", 2, _cube(-2, 2, 2), 2.0, goldstein_price, 3.0,
        np.array([0.0, -1.0]),
    ),
    "Rastrigin2": lambda: BenchmarkProblem(
        "Rastrigin2", 2, _cube(-5.12, 5.12, 2), 0.5, rastrigin, 0.0, np.zeros(2)
    ),
    "Hartmann6": lambda: BenchmarkProblem(
        "Hartmann6", 6, _cube(0, 1, 6), 0.05, hartmann6, -3.322368011415511,
        _HARTMANN6_MINIMIZER,
    ),
    "PowerSum4": lambda: BenchmarkProblem(
        "PowerSum4", 4, _cube(0, 4, 4), 1.0, power_sum, 0.0,
        np.array([1.0, 2.0, 2.0, 3.0]),
    ),
}

BENCHMARK_NAMES = tuple(_REGISTRY)


def make_benchmark(name: str) -> BenchmarkProblem:
    """Look up one of the named benchmark problems."""
    try:
        return _REGISTRY[name]()
    except KeyError:
        raise ValueError(
            f"unknown benchmark {name!r}; valid names: {', '.join(BENCHMARK_NAMES)}"
        ) from None


def noisy_eval(problem: BenchmarkProblem, x, rng: np.random.Generator) -> float:
    """One noisy observation: true mean plus Gaussian noise from ``rng``."""
    x = np.asarray(x, dtype=float)
    if not problem.domain.contains(x):
        raise ValueError(f"point {x} lies outside the domain of {problem.name}")
    return float(problem.true_mean(x)) + problem.noise_std * float(rng.standard_normal())


class NoisyBatchEvaluator:
    """Batch evaluator with one noise substream per evaluation.

    Substreams are spawned from a single seed in submission order, so results
    are reproducible regardless of how many workers execute the batch.
    """

    def __init__(self, problem: BenchmarkProblem, seed, max_workers: int | None = None):
        self.problem = problem
        self._seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
        self.max_workers = max_workers

    def _one(self, x, seq):
        return noisy_eval(self.problem, x, np.random.default_rng(seq))

    def __call__(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        seqs = self._seq.spawn(len(X))
        if self.max_workers:
            with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
                values = list(pool.map(self._one, X, seqs))
        else:
            values = [self._one(x, s) for x, s in zip(X, seqs)]
        return np.asarray(values)


def benchmark_objective(problem: BenchmarkProblem, seed: int) -> Objective:
    """Wrap a benchmark as an Objective with its own locked noise stream.

    Suitable for serial use or as the domain/dimension carrier for the engine;
    batch-parallel runs should evaluate through ``NoisyBatchEvaluator``.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    lock = threading.Lock()

    def evaluate(x):
        with lock:
            return noisy_eval(problem, x, rng)

    return Objective(problem.dimension, problem.domain, evaluate)
