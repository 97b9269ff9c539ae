#!/usr/bin/env python3
"""Benchmark the cancellation-norm interval DP: numba kernel vs numpy fallback.

The DP is the package's hot loop (O(L^3) in the word length); translation
lengths and cone distances evaluate it on words of hundreds of letters.
Run:

    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --lengths 64 128 256 512 --repeats 5
"""

from __future__ import annotations

import argparse
import random
import time

import numpy as np

from binorms import kernels
from binorms.sampling import random_free_word


def time_fn(fn, codes, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(codes)
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--lengths", type=int, nargs="+", default=[32, 64, 128, 256])
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    words = {}
    for length in args.lengths:
        w = random_free_word(rng, 2, length)
        while len(w) < length:  # reduction can shorten; resample
            w = random_free_word(rng, 2, length + 8)
        words[length] = np.asarray(w.codes()[:length], dtype=np.int64)

    if kernels.NUMBA_AVAILABLE:
        kernels._dp_numba(words[args.lengths[0]])  # compile outside the timing
    else:
        print("numba unavailable; timing the numpy path only")

    header = f"{'length':>8} {'numpy (s)':>12}"
    if kernels.NUMBA_AVAILABLE:
        header += f" {'numba (s)':>12} {'speedup':>9}"
    print(header)
    for length in args.lengths:
        codes = words[length]
        t_numpy = time_fn(kernels._dp_numpy, codes, args.repeats)
        line = f"{length:>8} {t_numpy:>12.5f}"
        if kernels.NUMBA_AVAILABLE:
            t_numba = time_fn(lambda c: int(kernels._dp_numba(c)), codes, args.repeats)
            line += f" {t_numba:>12.5f} {t_numpy / t_numba:>8.1f}x"
            assert int(kernels._dp_numba(codes)) == kernels._dp_numpy(codes)
        print(line)


if __name__ == "__main__":
    main()
