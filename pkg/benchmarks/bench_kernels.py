#!/usr/bin/env python3
"""Compare the compiled and pure-python kernel backends.

Times the two hot kernels (voxel count-signal extraction and single-scale
local spectrum scoring) on uniform random clouds and reports the speedup.
Each pair of runs is also cross-checked: counts must match bit for bit,
scores to fp roundoff.

Usage:
    python3 benchmarks/bench_kernels.py [--sizes 2000,10000,50000]
        [--k 3] [--neighbors 7] [--workers 1] [--repeat 3]
"""

import argparse
import time

import numpy as np

from hgresample import SpatialIndex, intrinsic_resolution
from hgresample.cloud import PointCloud
from hgresample.kernels import active_backend, count_signals, lhf_gamma


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="2000,10000,50000")
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--neighbors", type=int, default=7)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    have_compiled = active_backend() == "compiled"
    print(f"active backend: {active_backend()}  k={args.k} "
          f"neighbors={args.neighbors} workers={args.workers} "
          f"repeat={args.repeat} (best)")
    if not have_compiled:
        print("compiled extension unavailable; timing the python backend only")
    header = f"{'n':>8} {'kernel':>8} {'python':>10}"
    if have_compiled:
        header += f" {'compiled':>10} {'speedup':>8}"
    print(header)

    for n in sizes:
        rng = np.random.default_rng(0)
        pts = rng.random((n, 3))
        cloud = PointCloud(pts)
        d = intrinsic_resolution(cloud, workers=args.workers)
        nbr = SpatialIndex(cloud).k_nearest_all(args.neighbors, workers=args.workers)
        kernels = {
            "counts": lambda impl: count_signals(pts, d, args.k, args.workers, impl),
            "gamma": lambda impl: lhf_gamma(pts, nbr, args.workers, impl),
        }
        for name, fn in kernels.items():
            t_py = best_of(lambda: fn("python"), args.repeat)
            row = f"{n:>8} {name:>8} {t_py:>9.3f}s"
            if have_compiled:
                t_cy = best_of(lambda: fn("compiled"), args.repeat)
                a, b = fn("python"), fn("compiled")
                if name == "counts":
                    assert a.tobytes() == b.tobytes(), "backend count mismatch"
                else:
                    assert np.abs(a - b).max() < 1e-10, "backend score mismatch"
                row += f" {t_cy:>9.3f}s {t_py / t_cy:>7.1f}x"
            print(row)


if __name__ == "__main__":
    main()
