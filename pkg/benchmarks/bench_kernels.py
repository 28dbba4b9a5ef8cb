"""Compiled vs pure-Python kernel timings.

The two backends are bit-identical by construction; this script only
measures the speed difference.  Run:

    python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from diamondgap import _purekernels
from diamondgap._backend import backend_name
from diamondgap.channel import gaussian_matrix
from diamondgap.linalg import symmetrize

try:
    from diamondgap import _kernels
except ImportError:
    _kernels = None


def _time(fn, reps):
    best = np.inf
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_jacobi(mod, mats, reps=5):
    def run():
        for m in mats:
            a = m.copy()
            v = np.eye(m.shape[0])
            mod.jacobi_rotate(a, v)
    return _time(run, reps)


def bench_grid(mod, steps, reps=3):
    args = (0.9, 1.4, 0.3, 0.8, 0.25, 0.7, 0.85)
    return _time(lambda: mod.simplex_grid_max(*args, steps), reps)


def main():
    print(f"active backend: {backend_name()}")
    if _kernels is None:
        print("compiled extension not built; showing pure timings only")

    for n in (2, 4, 8, 16):
        mats = [symmetrize(gaussian_matrix(n, n, s, 0)) for s in range(64)]
        tp = bench_jacobi(_purekernels, mats)
        row = f"jacobi n={n:2d} (64 matrices): pure {tp * 1e3:8.2f} ms"
        if _kernels is not None:
            tc = bench_jacobi(_kernels, mats)
            row += f"   compiled {tc * 1e3:8.2f} ms   speedup {tp / tc:6.1f}x"
        print(row)

    for steps in (500, 2000):
        tp = bench_grid(_purekernels, steps)
        row = f"grid steps={steps:4d}:          pure {tp * 1e3:8.2f} ms"
        if _kernels is not None:
            tc = bench_grid(_kernels, steps)
            row += f"   compiled {tc * 1e3:8.2f} ms   speedup {tp / tc:6.1f}x"
        print(row)


if __name__ == "__main__":
    main()
