"""Time the numba kernels against the pure-numpy fallback.

Run with ``python scripts/bench_kernels.py``. Sizes mirror a typical
optimization iteration: a few thousand candidates against a few hundred
evaluated points in up to ten dimensions.
"""

import time

import numpy as np

from prosrs._kernels import NUMBA_IMPLS, NUMPY_IMPLS


def time_call(fn, args, repeats=7):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    rng = np.random.default_rng(0)
    cases = []
    for d in (2, 10):
        cand = rng.random((5000, d))
        refs = rng.random((300, d))
        dmin = rng.random(5000)
        new = rng.random(d)
        centers = rng.random((300, d))
        cases.append((f"min_dists      t=5000 n=300 d={d}", "min_dists", (cand, refs)))
        cases.append((f"update_min     t=5000 d={d}", "update_min_dists", (dmin, cand, new)))
        cases.append((f"multiquadric   300x300 d={d}", "multiquadric_matrix", (centers, centers)))

    if NUMBA_IMPLS is None:
        print("numba is not available; timing the numpy backend only")

    header = f"{'kernel':36s} {'numpy [ms]':>12s} {'numba [ms]':>12s} {'speedup':>9s}"
    print(header)
    print("-" * len(header))
    for label, name, args in cases:
        t_np = time_call(NUMPY_IMPLS[name], args)
        if NUMBA_IMPLS is not None:
            NUMBA_IMPLS[name](*args)  # trigger compilation outside the timing
            t_nb = time_call(NUMBA_IMPLS[name], args)
            print(f"{label:36s} {t_np * 1e3:12.3f} {t_nb * 1e3:12.3f} {t_np / t_nb:8.1f}x")
        else:
            print(f"{label:36s} {t_np * 1e3:12.3f} {'-':>12s} {'-':>9s}")


if __name__ == "__main__":
    main()
