"""Compiled vs interpreted kernel timings.

Each kernel is timed through its numba dispatcher and through ``.py_func``
(the same source run by CPython). Results must agree before timings count.

    python3 benchmarks/bench_kernels.py --n 100000 --repeat 3
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from truncvar import kernels
from truncvar._accel import BACKEND


def best_of(fn, args, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_same(u, v) for u, v in zip(a, b))
    return np.allclose(a, b, rtol=1e-12, atol=1e-12)


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=100_000, help="path length")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    x = np.cumsum(rng.standard_normal(args.n)) / np.sqrt(args.n)
    short = x[: min(args.n, 2000)]
    levels = np.linspace(short.min(), short.max(), 200)
    cases = [
        ("truncvar_prefix", kernels.truncvar_prefix, (x, 0.02)),
        ("backlash", kernels.backlash, (x, 0.01)),
        ("kahan_cumsum", kernels.kahan_cumsum, (x,)),
        ("truncvar_dp (n=2000)", kernels.truncvar_dp, (short, 0.02)),
        ("crossing counts (n=2000, 200 levels)", kernels.crossing_counts_levels, (short, levels, 0.05)),
    ]
    print(f"backend={BACKEND} n={args.n} repeat={args.repeat}")
    print(f"{'kernel':<40}{'active [s]':>12}{'py_func [s]':>13}{'speedup':>10}")
    for name, fn, fargs in cases:
        fn(*fargs)  # compile outside the timing
        ref = fn.py_func(*fargs)
        if not _same(fn(*fargs), ref):
            raise SystemExit(f"{name}: backends disagree")
        fast = best_of(fn, fargs, args.repeat)
        slow = best_of(fn.py_func, fargs, 1)
        print(f"{name:<40}{fast:>12.4f}{slow:>13.4f}{slow / fast:>9.1f}x")


if __name__ == "__main__":
    main()
