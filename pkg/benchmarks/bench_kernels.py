#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--size 1024] [--repeat 3]
"""

import argparse
import time

import numpy as np

from pansharp.kernels import available_backends, window_offsets


def best_of(repeat, fn):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--size", type=int, default=1024)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = available_backends()
    if len(backends) < 2:
        print("note: compiled extension missing, benchmarking numpy backend only")

    rng = np.random.default_rng(0)
    n = args.size
    ps = rng.uniform(0, 1, (3, n, n)).astype(np.float32)
    ms = rng.uniform(0, 1, (3, n, n)).astype(np.float32)
    feat = rng.uniform(0, 1, (16, n // 4, n // 4)).astype(np.float32)
    weights = rng.normal(0, 0.2, (16, 16, 3, 3)).astype(np.float32)
    bias = rng.normal(0, 0.1, 16).astype(np.float32)

    rows = []
    for w in (3, 7):
        off_y, off_x = window_offsets(w)
        for name, impl in backends.items():
            out = np.empty_like(ps)
            dt = best_of(args.repeat, lambda: impl.recolor_rows(ps, ms, off_y, off_x, 0, n, out))
            rows.append((f"recolor {n}x{n} w={w}", name, dt))

    for name, impl in backends.items():
        dt = best_of(args.repeat, lambda: impl.conv2d_replicate(feat, weights, bias))
        rows.append((f"conv 16->16 3x3 {n // 4}x{n // 4}", name, dt))
        dt = best_of(args.repeat, lambda: impl.maxpool_valid(feat, 7, 1))
        rows.append((f"maxpool 7x7 {n // 4}x{n // 4}", name, dt))

    width = max(len(r[0]) for r in rows)
    baselines = {}
    for label, name, dt in rows:
        baselines.setdefault(label, dt)
        speedup = baselines[label] / dt
        print(f"{label:<{width}}  {name:<7}  {dt * 1e3:9.2f} ms  ({speedup:5.2f}x)")


if __name__ == "__main__":
    main()
