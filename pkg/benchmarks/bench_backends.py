#!/usr/bin/env python3
"""Benchmark the falling-time kernels: numba vs pure numpy.

Usage:
    python benchmarks/bench_backends.py [--lo 3] [--hi 2^24] [--repeat 3]

Runs both backends on the same candidate array (n = 3 mod 4 in [lo, hi)),
checks they agree bit-for-bit, and prints per-backend timings plus the
speedup.  The big-integer reference is timed on a small slice to show why
the kernels exist.
"""

import argparse
import time

import numpy as np

from cjump import kernels
from cjump.cli import parse_nat
from cjump.jumps import falling_time


def time_backend(fn, ns, backend, repeat):
    fn(ns[:64], backend=backend)  # warm (jit compile / cache load)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(ns, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--lo", type=parse_nat, default=3)
    ap.add_argument("--hi", type=parse_nat, default=1 << 24)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--bigint-slice", type=int, default=20000,
                    help="how many values to run through the big-integer path")
    args = ap.parse_args()

    first = args.lo + ((3 - args.lo) % 4)
    ns = np.arange(first, args.hi, 4, dtype=np.uint64)
    print(f"candidates: {ns.size:,} (n = 3 mod 4 in [{args.lo}, {args.hi}))")

    backends = ["numpy"]
    if kernels._load_numba() is not None:
        backends.append("numba")
    else:
        print("numba not importable; benchmarking numpy only")

    for name, fn in (("ft", kernels.falling_times), ("sft", kernels.syr_falling_times)):
        results = {}
        for backend in backends:
            secs, out = time_backend(fn, ns, backend, args.repeat)
            results[backend] = (secs, out)
            rate = ns.size / secs / 1e6
            print(f"  {name:<4} {backend:<6} {secs:8.3f} s   {rate:7.1f} M values/s")
        if len(results) == 2:
            agree = np.array_equal(results["numba"][1], results["numpy"][1])
            speedup = results["numpy"][0] / results["numba"][0]
            print(f"  {name:<4} agree: {agree}   numba speedup: {speedup:.1f}x")
            if not agree:
                raise SystemExit("backend mismatch")

    k = min(args.bigint_slice, ns.size)
    t0 = time.perf_counter()
    for n in ns[:k]:
        falling_time(int(n))
    secs = time.perf_counter() - t0
    print(f"  ft   bigint {secs:8.3f} s   {k / secs / 1e6:7.3f} M values/s "
          f"(first {k:,} values)")


if __name__ == "__main__":
    main()
