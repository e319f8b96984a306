"""Timing comparison of the compiled kernels against the numpy fallback.

Usage: python benchmarks/bench_backends.py [--repeats N]
"""

import argparse
import time

import numpy as np

from expkant import _kernels_py, backend


def best_of(repeats, fn, *args):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repeats per case (best-of)")
    args = parser.parse_args()

    if not backend.HAVE_COMPILED:
        print("compiled extension not built; only the python backend exists")
        return

    from expkant import _fastkern

    rng = np.random.default_rng(0)
    y = np.linspace(0.0, 1.0, 4096)
    t = np.arange(-2000.0, 2001.0)
    coeffs = rng.standard_normal(t.size)
    v = rng.uniform(-20.0, 20.0, 1_000_000)

    cases = [
        ("bspline_values(1e6 pts, n=2)",
         lambda m: m.bspline_values(v, 2)),
        ("bspline_values(1e6 pts, n=4)",
         lambda m: m.bspline_values(v, 4)),
        ("fejer_values(1e6 pts)",
         lambda m: m.fejer_values(v)),
        ("phase_weighted_sum(4096 x 4001, beta=0)",
         lambda m: m.phase_weighted_sum(y, t, 0.0, backend.KIND_FEJER, 0)),
        ("phase_weighted_sum(4096 x 4001, beta=0.5)",
         lambda m: m.phase_weighted_sum(y, t, 0.5, backend.KIND_BSPLINE, 2)),
        ("weighted_series_sum(4096 x 4001)",
         lambda m: m.weighted_series_sum(y, t, coeffs, backend.KIND_FEJER, 0)),
    ]

    print(f"{'case':44s} {'python':>10s} {'compiled':>10s} {'speedup':>8s}")
    for name, fn in cases:
        t_py = best_of(args.repeats, fn, _kernels_py)
        t_c = best_of(args.repeats, fn, _fastkern)
        print(f"{name:44s} {t_py * 1e3:9.2f}ms {t_c * 1e3:9.2f}ms "
              f"{t_py / t_c:7.1f}x")


if __name__ == "__main__":
    main()
