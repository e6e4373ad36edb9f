"""Time the compiled kernels against the pure-Python fallback.

Runs the same workloads through both backends and prints a table of
per-call times and speedups. The workloads mirror the hot paths of the
valuation and simulation code: posterior updates, mixture CDF lookups,
margin scans, and root refinement.

Usage:
    python3 benchmarks/bench_backends.py [--repeats 5] [--scale 1.0]
"""

from __future__ import annotations

import argparse
import importlib
import time

import numpy as np

from cisim import _kernels_py


def load_compiled():
    try:
        return importlib.import_module("cisim._kernels")
    except ImportError:
        return None


def best_of(repeats: int, fn) -> float:
    """Wall time of the fastest repeat, in seconds."""
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def make_workloads(scale: float):
    rng = np.random.default_rng(12)
    mus = np.array([0.0, 2.0, 4.0])
    sds = np.array([1.0, 1.5, 2.0])
    prior = np.full(3, 1.0 / 3.0)
    log_prior = np.log(prior)
    q = np.array([0.25, 0.45, 0.30])
    xs = rng.uniform(-6.0, 10.0, size=int(20_000 * scale))
    joint_vals = rng.uniform(-6.0, 10.0, size=(int(4_000 * scale), 4))
    mus4 = np.tile(mus, (4, 1))
    sds4 = np.tile(sds, (4, 1))
    brackets = [(m - 0.4, m + 0.7) for m in np.linspace(-4.0, 8.0, 40)]

    def bench_posterior(mod):
        for x in xs:
            mod.posterior(x, mus, sds, log_prior)

    def bench_joint(mod):
        for row in joint_vals:
            mod.joint_posterior(row, mus4, sds4, log_prior)

    def bench_cdf(mod):
        for x in xs:
            mod.mixture_cdf(x, mus, sds, prior)

    def bench_score(mod):
        for x in xs:
            mod.score_max(x, q, mus, sds, 0.6)

    def bench_scan(mod):
        for _ in range(int(200 * scale)):
            mod.class_sign_changes(
                1, q, mus, sds, 0.6, 2.0, 0.125 / 8.0, -12.0, 16.0, 100_000
            )

    def bench_refine(mod):
        for _ in range(int(200 * scale)):
            for a, b in brackets:
                mod.refine_root(1, q, mus, sds, 0.6, a, b, 1e-12)

    return [
        ("posterior", bench_posterior, len(xs)),
        ("joint_posterior", bench_joint, len(joint_vals)),
        ("mixture_cdf", bench_cdf, len(xs)),
        ("score_max", bench_score, len(xs)),
        ("margin_scan", bench_scan, int(200 * scale)),
        ("refine_root", bench_refine, int(200 * scale) * len(brackets)),
    ]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5, help="take the best of N runs")
    parser.add_argument(
        "--scale", type=float, default=1.0, help="multiply workload sizes"
    )
    args = parser.parse_args()

    compiled = load_compiled()
    if compiled is None:
        print("compiled backend not built; showing pure-Python timings only")

    header = f"{'workload':<16} {'calls':>7} {'python':>12} {'compiled':>12} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, fn, calls in make_workloads(args.scale):
        py = best_of(args.repeats, lambda: fn(_kernels_py))
        line = f"{name:<16} {calls:>7} {py * 1e3:>10.1f}ms"
        if compiled is not None:
            cy = best_of(args.repeats, lambda: fn(compiled))
            line += f" {cy * 1e3:>10.1f}ms {py / cy:>7.1f}x"
        print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
