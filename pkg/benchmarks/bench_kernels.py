"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--points 60] [--obstacles 40] [--pop 200]

Both backends get identical inputs; results are checked for equality
before any timing is reported.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from dpdp import _kernels_py

try:
    from dpdp import _ckernels
except ImportError:
    _ckernels = None


def make_inputs(n_points: int, n_obstacles: int, pop: int, seed: int):
    rng = np.random.default_rng(seed)
    points = rng.uniform(0, 2000, (n_points, 2))
    lo = rng.uniform(0, 1800, (n_obstacles, 2))
    rects = np.c_[lo, lo + rng.uniform(20, 200, (n_obstacles, 2))]
    orders = np.stack([rng.permutation(np.arange(1, n_points)) for _ in range(pop)]).astype(np.int64)
    return points, rects, orders


def bench(mod, points, rects, orders, repeat: int) -> dict[str, float]:
    dist, hits = mod.leg_matrices(points, rects)
    t_leg = min(timeit.repeat(lambda: mod.leg_matrices(points, rects), number=1, repeat=repeat))
    t_pop = min(timeit.repeat(lambda: mod.population_sums(dist, hits, orders, 0), number=1, repeat=repeat))
    return {"leg_matrices": t_leg, "population_sums": t_pop}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=60)
    ap.add_argument("--obstacles", type=int, default=40)
    ap.add_argument("--pop", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    points, rects, orders = make_inputs(args.points, args.obstacles, args.pop, args.seed)
    print(f"{args.points} points, {args.obstacles} obstacles, population {args.pop}")
    py = bench(_kernels_py, points, rects, orders, args.repeat)
    if _ckernels is None:
        print("compiled extension not built; python timings only")
        for k, v in py.items():
            print(f"  {k:16s} python {v * 1e3:9.3f} ms")
        return

    d1, h1 = _kernels_py.leg_matrices(points, rects)
    d2, h2 = _ckernels.leg_matrices(points, rects)
    assert np.array_equal(d1, d2) and np.array_equal(h1, h2), "backends disagree on leg matrices"
    s1 = _kernels_py.population_sums(d1, h1, orders, 0)
    s2 = _ckernels.population_sums(d2, h2, orders, 0)
    assert all(np.array_equal(a, b) for a, b in zip(s1, s2)), "backends disagree on route sums"

    cy = bench(_ckernels, points, rects, orders, args.repeat)
    print(f"  {'kernel':16s} {'python':>12s} {'cython':>12s} {'speedup':>8s}")
    for k in py:
        print(f"  {k:16s} {py[k] * 1e3:9.3f} ms {cy[k] * 1e3:9.3f} ms {py[k] / cy[k]:7.1f}x")


if __name__ == "__main__":
    main()
