"""Compiled vs numpy kernel timings, per kernel and for a full GES run.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5] [--rows 5000]
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from causal_eval import _kernels_py, kernels

try:
    from causal_eval import _kernels as compiled
except ImportError:
    compiled = None

END_TO_END = """
import time
from causal_eval.datagen import synthetic_benchmark
from causal_eval.learners import ges
from causal_eval.kernels import BACKEND
[(net, data)] = synthetic_benchmark(1, 14, 2.0, {rows}, seed=3)
t = time.perf_counter()
ges(data)
print(BACKEND, time.perf_counter() - t)
"""


def kernel_cases(rows: int, rng):
    codes = rng.integers(0, 2, size=(rows, 14)).astype(np.int64)
    cols = np.array([0, 3, 5, 7, 9], dtype=np.int64)
    cards = np.full(5, 2, dtype=np.int64)
    family = rng.integers(0, 200, size=(16, 3)).astype(np.int64)
    strata = rng.integers(0, 200, size=(32, 2, 2)).astype(np.int64)
    return {
        "contingency": lambda impl: kernels.contingency(codes, cols, cards, impl=impl),
        "bdeu_family": lambda impl: kernels.bdeu_family(family, 10.0, impl=impl),
        "g2_statistic": lambda impl: kernels.g2_statistic(strata, impl=impl),
    }


def best_of(fn, repeat: int) -> float:
    timer = timeit.Timer(fn)
    number, _ = timer.autorange()
    return min(timer.repeat(repeat, number)) / number


def end_to_end(rows: int, pure: bool) -> str:
    env = dict(os.environ, CAUSAL_EVAL_PURE_PYTHON="1" if pure else "0")
    out = subprocess.run([sys.executable, "-c", END_TO_END.format(rows=rows)],
                         env=env, capture_output=True, text=True, check=True)
    backend, seconds = out.stdout.split()
    return f"{backend:>9s}  {float(seconds):8.3f} s"


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--rows", type=int, default=5000)
    args = p.parse_args(argv)

    print(f"active backend: {kernels.BACKEND}")
    if compiled is None:
        print("compiled extension not built; showing the numpy path only")
    print(f"{'kernel':<14s}{'numpy (us)':>12s}{'compiled (us)':>15s}{'speedup':>9s}")
    for name, fn in kernel_cases(args.rows, np.random.default_rng(0)).items():
        slow = best_of(lambda: fn(_kernels_py), args.repeat) * 1e6
        if compiled is None:
            print(f"{name:<14s}{slow:12.2f}")
            continue
        fast = best_of(lambda: fn(compiled), args.repeat) * 1e6
        print(f"{name:<14s}{slow:12.2f}{fast:15.2f}{slow / fast:8.1f}x")

    print(f"\nGES on 14 variables x {args.rows} rows")
    print(end_to_end(args.rows, pure=True))
    if compiled is not None:
        print(end_to_end(args.rows, pure=False))


if __name__ == "__main__":
    main()
