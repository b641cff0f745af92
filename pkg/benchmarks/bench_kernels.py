"""Time the numba and pure-numpy paths of the hot kernels.

    python benchmarks/bench_kernels.py [--bound 200000] [--repeat 3]

Both paths are called directly, so the MQCENSUS_NO_NUMBA flag does not
matter here.  Results are checked against each other before timing.
"""

import argparse
import time

import numpy as np

from mqcensus import kernels
from mqcensus._accel import USE_NUMBA


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_tally(bound, repeat):
    a_hi = kernels.tally_a_max(bound)
    ref = kernels._tally_numpy(bound, 1, a_hi)
    if USE_NUMBA:
        got = kernels._tally_jit(bound, 1, a_hi)  # also compiles
        assert np.array_equal(ref, got), "tally paths disagree"
    t_np = best_of(lambda: kernels._tally_numpy(bound, 1, a_hi), repeat)
    t_nb = best_of(lambda: kernels._tally_jit(bound, 1, a_hi), repeat) if USE_NUMBA else None
    return t_np, t_nb


def _single(D, head, tail):
    hm = int(D ** 0.5) // 2
    tm = int((D // 3) ** 0.5)
    primes = kernels.small_primes(hm)
    return int(head(D, primes, hm)) + int(tail(D, hm + 1, tm))


def bench_single(discs, repeat):
    np_path = (kernels._ideal_count_head_numpy, kernels._reduced_tail_numpy)
    nb_path = (kernels._ideal_count_head_jit, kernels._reduced_tail_jit)
    ref = [_single(D, *np_path) for D in discs]
    if USE_NUMBA:
        assert ref == [_single(D, *nb_path) for D in discs], "single-discriminant paths disagree"
    t_np = best_of(lambda: [_single(D, *np_path) for D in discs], repeat)
    t_nb = best_of(lambda: [_single(D, *nb_path) for D in discs], repeat) if USE_NUMBA else None
    return t_np, t_nb


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--bound", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    discs = [4 * 100_003, 4 * 1_000_003, 99_999_991, 4 * 12_345_679]
    rows = [("reduced_form_tally B=%d" % args.bound, *bench_tally(args.bound, args.repeat)),
            ("count_reduced_definite x%d" % len(discs), *bench_single(discs, args.repeat))]
    print(f"{'kernel':<34}{'numpy s':>10}{'numba s':>10}{'speedup':>9}")
    for name, t_np, t_nb in rows:
        if t_nb is None:
            print(f"{name:<34}{t_np:>10.4f}{'n/a':>10}{'':>9}")
        else:
            print(f"{name:<34}{t_np:>10.4f}{t_nb:>10.4f}{t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
