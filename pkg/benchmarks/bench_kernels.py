"""Timing comparison of the numba and numpy kernel backends.

Runs the three hot contractions (operator-operator convolution via diagonal
reduction, function-operator convolution via weighted shifts, and the mask
autocorrelation counts) on random inputs for a few lattice sizes and prints
the per-call time of each backend plus the resulting speedup.

Usage: python benchmarks/bench_kernels.py [--sizes 32,64,128] [--repeats 5]
"""
from __future__ import annotations

import argparse
import os
import time

import numpy as np

from qha import backend


def _inputs(rng, n):
    s = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    t = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    fhat = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    mask = rng.random((n, n)) < 0.4
    return s, t, fhat, mask


def _time(fn, repeats):
    fn()  # warm-up; compiles the numba kernel on first use
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run(sizes, repeats):
    rng = np.random.default_rng(0)
    kernels = {
        "diag_reduce": lambda s, t, fhat, mask: backend.diag_reduce(s, t),
        "weighted_shifts": lambda s, t, fhat, mask: backend.weighted_shifts(fhat, s),
        "mask_autocorr": lambda s, t, fhat, mask: backend.mask_autocorr(mask),
    }
    print(f"{'kernel':<16} {'N':>4} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    for n in sizes:
        args = _inputs(rng, n)
        for name, kernel in kernels.items():
            times = {}
            for choice in ("numpy", "numba"):
                os.environ["QHA_BACKEND"] = choice
                times[choice] = _time(lambda: kernel(*args), repeats)
            os.environ.pop("QHA_BACKEND", None)
            print(f"{name:<16} {n:>4} {times['numpy'] * 1e3:>9.3f}ms "
                  f"{times['numba'] * 1e3:>9.3f}ms "
                  f"{times['numpy'] / times['numba']:>7.2f}x")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="32,64,128",
                        help="comma-separated lattice sizes")
    parser.add_argument("--repeats", type=int, default=5,
                        help="timed repetitions per kernel (best is reported)")
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    run(sizes, args.repeats)


if __name__ == "__main__":
    main()
