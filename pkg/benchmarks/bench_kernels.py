"""Wall-clock comparison of the compiled and numpy time-stepping kernels.

Usage: python benchmarks/bench_kernels.py [--N 100 200 400] [--t-end 0.2] [--repeat 3]

Each case runs the spreading configuration (nu = c = a = M = 1, v0 = 1,
eps = 1e-3) with both backends, reports the best of ``--repeat`` timings and
checks that the final states agree.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from satflux import ModelParams, SchemeConfig, kernels, make_classical_flux, run


def best_time(params, cfg, backend, repeat):
    best, traj = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        traj = run(params, cfg, 1.0, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, traj


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, nargs="+", default=[100, 200, 400])
    ap.add_argument("--t-end", type=float, default=0.2)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    if kernels._ckernel is None:
        print("compiled kernel unavailable; build with `pip install -e . --no-build-isolation`")
        return 1
    params = ModelParams(a=1.0, m=0.0, M=1.0, flux=make_classical_flux(1.0, 1.0))
    print(f"{'N':>6} {'steps':>8} {'compiled [s]':>13} {'python [s]':>11} {'speedup':>8} {'max |dv|':>10}")
    for N in args.N:
        cfg = SchemeConfig(N=N, eps=1e-3, t_end=args.t_end, snapshot_dt=args.t_end)
        tc, a = best_time(params, cfg, "compiled", args.repeat)
        tp, b = best_time(params, cfg, "python", args.repeat)
        dv = float(np.max(np.abs(a.states[-1].v - b.states[-1].v)))
        print(f"{N:>6} {a.meta['steps']:>8} {tc:>13.4f} {tp:>11.4f} {tp / tc:>8.1f} {dv:>10.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
