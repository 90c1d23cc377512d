"""Wall-clock comparison of the numba and numpy kernels.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat N]

Each workload is timed on both backends after one warm-up call (which also
triggers JIT compilation on the numba side), and the largest difference
between the two results is reported next to the timings.
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from nmc import _backend
from nmc.graph_nmc import nmc_of_graph, phi_system
from nmc.kernels import KernelContext
from nmc.series import CosineSeries
from nmc.setgeom import PlanarSet, nmc_of_set
from nmc.spectrum import critical_context


def _workloads():
    ctx = KernelContext(0.5, 1.0)
    crit = critical_context(0.5)
    u = CosineSeries([1.0, 0.1, -0.03, 0.01])
    s = np.linspace(0.0, math.pi, 16)
    v = CosineSeries(np.r_[0.01, 1.0, 0.05 / np.arange(2, 17) ** 2])
    ell = PlanarSet.ellipse(2.0, 1.0)
    x, _ = ell.boundary_param(0.4)
    band = PlanarSet.graph_band(CosineSeries([0.6, 0.05]))
    return {
        "graph curvature, 16 points": lambda: nmc_of_graph(ctx, u, s),
        "Phi with Jacobian, 16 points": lambda: phi_system(crit, 0.02, 1.0, v, s).jac,
        "ellipse, set-based": lambda: nmc_of_set(ctx, ell, x),
        "graph band, set-based": lambda: nmc_of_set(ctx, band, (0.3, band.profile(0.3))),
    }


def _time(fn, repeat: int):
    fn()
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, np.asarray(out, dtype=float)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not _backend.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"{'workload':32s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speedup':>8s} {'max diff':>9s}")
    for name, fn in _workloads().items():
        res = {}
        for flag in (True, False):
            _backend.USE_NUMBA = flag
            res[flag] = _time(fn, args.repeat)
        (tn, a), (tp, b) = res[True], res[False]
        diff = float(np.max(np.abs(a - b)))
        print(f"{name:32s} {tn:10.4f} {tp:10.4f} {tp / tn:8.1f} {diff:9.1e}")
    _backend.USE_NUMBA = _backend.HAVE_NUMBA


if __name__ == "__main__":
    main()
