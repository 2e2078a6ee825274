"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--rows 2000]

Each kernel is run on the same inputs by both backends; outputs are
checked for equality before timings are reported.
"""

import argparse
import math
import timeit

import numpy as np

from wikiccc._kernels import available_backends


def tree_inputs(rows, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(rows, 14))
    y = (X[:, 3] + 0.5 * X[:, 7] + rng.normal(scale=0.7, size=rows) > 0).astype(np.int64)
    samples = rng.integers(0, rows, size=rows)
    return X, y, samples


def ring_inputs(points, vertices=64, seed=0):
    rng = np.random.default_rng(seed)
    angles = np.sort(rng.uniform(0, 2 * math.pi, size=vertices))
    radii = rng.uniform(2, 10, size=vertices)
    ring = np.column_stack([45 + radii * np.sin(angles), 10 + radii * np.cos(angles)])
    pts = rng.uniform([33, -2], [57, 22], size=(points, 2))
    return pts[:, 0].copy(), pts[:, 1].copy(), ring


def _same(a, b):
    if isinstance(a, tuple):
        return len(a) == len(b) and all(np.array_equal(x, z) for x, z in zip(a, b))
    return np.array_equal(a, b)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--rows", type=int, default=2000, help="training rows for grow_tree")
    ap.add_argument("--points", type=int, default=200_000, help="points for points_in_ring")
    args = ap.parse_args(argv)

    backends = available_backends()
    if "cython" not in backends:
        print("compiled backend not built; only the fallback is timed")

    X, y, samples = tree_inputs(args.rows)
    lats, lons, ring = ring_inputs(args.points)
    cases = {
        "grow_tree": lambda m: m.grow_tree(X, y, samples, 12345, 4, 2),
        "points_in_ring": lambda m: m.points_in_ring(lats, lons, ring),
    }

    print(f"{'kernel':<16}{'backend':<10}{'best (s)':>12}{'speedup':>10}")
    for name, call in cases.items():
        results, best = {}, {}
        for backend, mod in backends.items():
            results[backend] = call(mod)
            best[backend] = min(timeit.repeat(lambda: call(mod), number=1, repeat=args.repeat))
        outs = list(results.values())
        if not all(_same(outs[0], other) for other in outs[1:]):
            raise SystemExit(f"{name}: backends disagree")
        for backend in backends:
            speedup = best["python"] / best[backend]
            print(f"{name:<16}{backend:<10}{best[backend]:>12.4f}{speedup:>9.1f}x")


if __name__ == "__main__":
    main()
