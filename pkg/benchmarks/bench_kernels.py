"""Benchmark the compiled kernel backend against the pure-python fallback.

Times the four kernel entry points on representative workloads plus one
end-to-end rotation-interval computation per backend, and prints a table
with the speedup of the compiled path. Run from a checkout or an install:

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import math
import time

import numpy as np

from rotorbit._kernels import _impl_py

try:
    from rotorbit._kernels import _kernels_c
except ImportError:
    _kernels_c = None


def _monotone_lift(m, a=0.8, tau=0.3):
    x = np.arange(m) / m
    return x + tau + (a / (2.0 * math.pi)) * np.sin(2.0 * math.pi * x)


def bench(fn, repeat):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def workloads():
    rng = np.random.default_rng(0)

    m = 1 << 14
    gv = _monotone_lift(m)
    gv_ext = np.append(gv, gv[0] + 1.0)
    K, steps = 50, 20000
    forcing_ens = rng.uniform(-0.5, 0.5, (steps, K))
    r0 = rng.uniform(0.0, 1.0, K)
    w0 = np.zeros(K)

    def ensemble(impl):
        r, w = r0.copy(), w0.copy()
        impl.ensemble_steps(gv_ext, r, w, forcing_ens)

    forcing_back = rng.uniform(-0.5, 0.5, 20000)
    c, p, q = 0.688, 0.249, 0.723

    def back_exact(impl):
        impl.backward_orbit_exact(c, p, q, 0.2, 1.5, forcing_back, 0.37)

    def back_grid(impl):
        impl.backward_orbit_grid(gv, forcing_back, 0.37)

    th = rng.uniform(0.0, 1.0, (41, 2000))
    x = rng.uniform(0.0, 1.0, (41, 2000))

    def greedy(impl):
        impl.greedy_separated(th, x, 0.05, 1.0)

    return [
        ("ensemble_steps (50 orbits x 20k steps, m=2^14)", ensemble),
        ("backward_orbit_exact (20k steps)", back_exact),
        ("backward_orbit_grid (20k steps, m=2^14)", back_grid),
        ("greedy_separated (2000 cands, horizon 40)", greedy),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5, help="timing repetitions (best-of)")
    args = ap.parse_args()

    if _kernels_c is None:
        print("compiled backend not available; showing pure-python timings only")

    rows = []
    for name, fn in workloads():
        t_py = bench(lambda: fn(_impl_py), args.repeat)
        if _kernels_c is not None:
            t_c = bench(lambda: fn(_kernels_c), args.repeat)
            rows.append((name, t_py, t_c, t_py / t_c))
        else:
            rows.append((name, t_py, None, None))

    w = max(len(r[0]) for r in rows)
    print(f"{'workload':<{w}}  {'python':>10}  {'compiled':>10}  {'speedup':>8}")
    for name, t_py, t_c, s in rows:
        if t_c is None:
            print(f"{name:<{w}}  {t_py * 1e3:>8.2f}ms  {'-':>10}  {'-':>8}")
        else:
            print(f"{name:<{w}}  {t_py * 1e3:>8.2f}ms  {t_c * 1e3:>8.2f}ms  {s:>7.1f}x")


if __name__ == "__main__":
    main()
