#!/usr/bin/env python3
"""Benchmark the pure-Python kernels against the compiled extension.

Times the dense primitives and a realistic training workload on each
available backend and prints a speedup table.  Results are informational;
correctness equivalence is asserted by the test suite (the backends are
bit-identical).

Usage:
    python benchmarks/bench_kernels.py           # full run
    python benchmarks/bench_kernels.py --quick   # smaller shapes
"""

import argparse
import sys
import time

from mailcat import kernels
from mailcat.features import one_hot
from mailcat.matrix import Matrix, matmul
from mailcat.model import LayerSpec, TrainConfig, train
from mailcat.rng import Rng


def random_matrix(rng, rows, cols):
    m = Matrix(rows, cols)
    for i in range(rows * cols):
        m.data[i] = rng.uniform(-1, 1)
    return m


def time_call(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        started = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - started)
    return best


def bench_matmul(backend, shape):
    m, k, n = shape
    rng = Rng(1, "bench")
    a = random_matrix(rng, m, k)
    b = random_matrix(rng, k, n)
    kernels.select(backend)
    seconds = time_call(lambda: matmul(a, b))
    flops = 2.0 * m * k * n
    return seconds, flops / seconds / 1e9


def bench_training(backend, docs, features, hidden, classes, epochs):
    rng = Rng(2, "bench-train")
    X = random_matrix(rng, docs, features)
    names = [f"c{c}" for c in range(classes)]
    Y = one_hot([names[rng.randrange(classes)] for _ in range(docs)], names)
    cfg = TrainConfig(seed=3, max_epochs=epochs, early_stop_patience=epochs)
    kernels.select(backend)
    started = time.perf_counter()
    train(X, Y, LayerSpec(features, hidden, classes), cfg)
    return time.perf_counter() - started


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="smaller shapes, faster run")
    args = parser.parse_args()

    backends = kernels.available_backends()
    if "compiled" not in backends:
        print("note: compiled extension not built; benchmarking pure backend only", file=sys.stderr)

    if args.quick:
        matmul_shapes = [(64, 128, 32), (128, 256, 64)]
        train_shape = (120, 200, 32, 5, 2)
    else:
        matmul_shapes = [(64, 128, 32), (256, 512, 128), (548, 2000, 100)]
        train_shape = (500, 1000, 100, 7, 3)

    print(f"{'kernel':<26} {'pure':>12} {'compiled':>12} {'speedup':>9}")
    print("-" * 62)
    for shape in matmul_shapes:
        label = "matmul {}x{}x{}".format(*shape)
        pure_s, pure_gf = bench_matmul("pure", shape)
        if "compiled" in backends:
            comp_s, comp_gf = bench_matmul("compiled", shape)
            print(
                f"{label:<26} {pure_s * 1e3:>9.1f} ms {comp_s * 1e3:>9.1f} ms "
                f"{pure_s / comp_s:>8.1f}x   ({comp_gf:.2f} GFLOP/s compiled)"
            )
        else:
            print(f"{label:<26} {pure_s * 1e3:>9.1f} ms {'-':>12} {'-':>9}")

    docs, features, hidden, classes, epochs = train_shape
    label = f"train {docs}x{features} h{hidden} e{epochs}"
    pure_s = bench_training("pure", docs, features, hidden, classes, epochs)
    if "compiled" in backends:
        comp_s = bench_training("compiled", docs, features, hidden, classes, epochs)
        print(f"{label:<26} {pure_s:>10.2f} s {comp_s:>10.2f} s {pure_s / comp_s:>8.1f}x")
    else:
        print(f"{label:<26} {pure_s:>10.2f} s {'-':>12} {'-':>9}")

    kernels.select("compiled" if "compiled" in backends else "pure")


if __name__ == "__main__":
    main()
