"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both backends are checked for bit-identical output before timing.
"""
import argparse
import time

import numpy as np

from rftopo import _fallback
from rftopo.filtration import star_filtration
from rftopo.mesh import build_grid, edge_values
from rftopo.profiles import symmetric_dumbbell_profile

try:
    from rftopo import _core
except ImportError:
    _core = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def flow_case(mod, steps=2000):
    prof = symmetric_dumbbell_profile(201)
    h = prof.grid[1] - prof.grid[0]

    def go():
        psi, phi = prof.psi.copy(), prof.phi.copy()
        for _ in range(steps):
            kp, kf = mod.dumbbell_rhs(psi, phi, h, True)[:2]
            psi, phi = mod.rk4_dumbbell(psi, phi, h, 1e-5, True, kp, kf)[:2]
        return psi

    return go


def reduction_case(mod, n=50):
    tri = build_grid(n, n)
    vals = np.random.default_rng(0).normal(size=tri.n_vertices)
    f = star_filtration(tri, edge_values(vals, tri))
    indptr, indices = f.boundary()
    dims = f.dims.astype(np.int64)
    return lambda: mod.reduce_boundary(indptr, indices, dims, True)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _core is None:
        print("compiled core not available; only the fallback can run")
        return
    cases = [("RK4 dumbbell, 201 nodes x 2000 steps", flow_case),
             ("boundary reduction, 50x50 mesh", reduction_case)]
    print(f"{'case':42s} {'python':>10s} {'compiled':>10s} {'speedup':>8s}")
    for label, make in cases:
        slow, fast = make(_fallback), make(_core)
        assert np.array_equal(slow(), fast()), f"backends disagree on {label}"
        tp, tc = best_of(slow, args.repeat), best_of(fast, args.repeat)
        print(f"{label:42s} {tp:9.4f}s {tc:9.4f}s {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
