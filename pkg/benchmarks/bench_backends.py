#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Usage: python benchmarks/bench_backends.py [--repeats 5]

Times the four hot kernels on representative workloads and prints a table
with the speedup of numba over numpy.  Numba compilation happens in an
untimed warmup pass.
"""

import argparse
import time

import numpy as np

from relmargin.kernels import IMPLEMENTATIONS


def _bench(fn, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if IMPLEMENTATIONS["numba"] is IMPLEMENTATIONS["numpy"]:
        print("numba unavailable: nothing to compare")
        return

    rng = np.random.default_rng(0)
    exact_vals = rng.random((18, 40))
    mc_vals = rng.random((200, 50))
    signs = rng.integers(0, 2, size=(4096, 200)) * 2.0 - 1.0
    dist_vals = rng.random((400, 50))
    signed = rng.normal(size=(500, 8))
    w0 = rng.normal(size=8)
    w0 /= np.linalg.norm(w0)

    workloads = [
        ("exact_mean_sup (m=18, pool=40)", "exact_mean_sup", (exact_vals,)),
        ("sup_signed_sums (4096 x 200 x 50)", "sup_signed_sums", (mc_vals, signs)),
        ("pairwise_linf (400 x 50)", "pairwise_linf", (dist_vals,)),
        ("pairwise_l2n (400 x 50)", "pairwise_l2n", (dist_vals,)),
        ("ramp_descent (m=500, 1500 steps)", "ramp_descent", (signed, w0, 0.2, 0.1, 1500, 1.0)),
    ]

    print(f"{'kernel':<38} {'numpy':>10} {'numba':>10} {'speedup':>9}")
    for label, name, call_args in workloads:
        numba_fn = IMPLEMENTATIONS["numba"][name]
        numpy_fn = IMPLEMENTATIONS["numpy"][name]
        numba_fn(*call_args)  # warm up / compile
        t_np = _bench(numpy_fn, call_args, args.repeats)
        t_nb = _bench(numba_fn, call_args, args.repeats)
        print(f"{label:<38} {t_np * 1e3:>8.2f}ms {t_nb * 1e3:>8.2f}ms {t_np / t_nb:>8.2f}x")


if __name__ == "__main__":
    main()
