"""Compare the numba and numpy kernel backends on synthetic logs.

    python benchmarks/bench_kernels.py --traces 10000 --activities 20 --repeat 3

Each kernel is timed per backend (numba after a warm-up call), then full
discovery is timed in a fresh process with and without PIM_DISABLE_NUMBA.
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from pim import _kernels
from pim.cuts import LogShape, _Context
from pim.graphs import build, flatten
from pim.synthetic import synthetic_log


def best_of(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def kernel_cases(n_traces: int, n_activities: int, seed: int):
    log = synthetic_log(n_traces, n_activities, seed=seed)
    acts = tuple(sorted(log.alphabet))
    follows_args = (*flatten(log, acts), len(acts))
    # exhaustive enumeration over the first 12 activities of a real score context
    small = synthetic_log(n_traces, 12, seed=seed)
    ctx = _Context.build(build(small), LogShape.of(small), "numpy")
    enum_args = (build(small).k, *ctx.args())
    rng = np.random.default_rng(seed)
    model_lengths = rng.integers(4, 12, size=2000)
    model_events = rng.integers(0, 10, size=int(model_lengths.sum()))
    offsets = np.zeros(len(model_lengths) + 1, dtype=np.int64)
    np.cumsum(model_lengths, out=offsets[1:])
    trace = rng.integers(0, 10, size=10)
    return {
        "follows_counts": lambda k: k.follows_counts(*follows_args),
        "enumerate_cuts(12)": lambda k: k.enumerate_cuts(*enum_args),
        "min_indel(2000 models)": lambda k: k.min_indel(trace, model_events, offsets),
    }


def discovery_time(n_traces: int, n_activities: int, disable: bool) -> float:
    code = (
        "import time; from pim.synthetic import synthetic_log; from pim.discovery import discover;"
        f"discover(synthetic_log(200, {n_activities}, seed=1));"
        f"log = synthetic_log({n_traces}, {n_activities}, seed=1);"
        "t0 = time.perf_counter(); discover(log); print(time.perf_counter() - t0)"
    )
    env = dict(os.environ, PIM_DISABLE_NUMBA="1" if disable else "0")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--traces", type=int, default=10_000)
    p.add_argument("--activities", type=int, default=20)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    cases = kernel_cases(args.traces, args.activities, args.seed)
    nb, npy = _kernels.get_kernels("numba"), _kernels.get_kernels("numpy")
    print(f"{'kernel':<24}{'numba s':>10}{'numpy s':>10}{'speedup':>9}")
    for name, fn in cases.items():
        fn(nb)  # compile
        t_nb = best_of(lambda: fn(nb), args.repeat)
        t_np = best_of(lambda: fn(npy), args.repeat)
        print(f"{name:<24}{t_nb:>10.4f}{t_np:>10.4f}{t_np / t_nb:>8.1f}x")

    t_nb = discovery_time(args.traces, args.activities, disable=False)
    t_np = discovery_time(args.traces, args.activities, disable=True)
    print(f"{'discover (end to end)':<24}{t_nb:>10.4f}{t_np:>10.4f}{t_np / t_nb:>8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
