"""Time the compiled and interpreted sweep kernels on the same inputs.

    python benchmarks/bench_kernels.py --kind square --extent 16 16 --sweeps 20
"""
import argparse
import time

import numpy as np

from hypersite import _kernels
from hypersite.lattice import LatticeSpec, build_lattice
from hypersite.spins import random_config


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run(kind, extent, sweeps, repeat, seed=0):
    lattice = build_lattice(LatticeSpec(kind, tuple(extent) if len(extent) > 1 else extent[0]))
    n = lattice.n_sites
    offsets, nbrs = lattice.neighbours
    rng = np.random.default_rng(seed)
    start = random_config(lattice, 1.0, seed).spins
    orders = [rng.permutation(n) for _ in range(sweeps)]
    axes = rng.standard_normal((sweeps, n, 3))
    axes /= np.linalg.norm(axes, axis=-1, keepdims=True)
    angles = rng.uniform(-0.5, 0.5, (sweeps, n))
    uniforms = rng.random((sweeps, n))

    def align(kernel):
        spins = start.copy()
        for k in range(sweeps):
            kernel(spins, offsets, nbrs, orders[k], 1.0)
        return spins

    def metropolis(kernel):
        spins = start.copy()
        for k in range(sweeps):
            kernel(spins, offsets, nbrs, orders[k], axes[k], angles[k], uniforms[k], 2.0, 1.0, 1.0)
        return spins

    # warm the jit cache before timing
    align(_kernels.align_sweep_numba)
    metropolis(_kernels.metropolis_sweep_numba)

    rows = []
    for name, driver, fast, slow in (
        ("align", align, _kernels.align_sweep_numba, _kernels.align_sweep_python),
        ("metropolis", metropolis, _kernels.metropolis_sweep_numba, _kernels.metropolis_sweep_python),
    ):
        diff = np.abs(driver(fast) - driver(slow)).max()
        t_fast = _time(lambda: driver(fast), repeat)
        t_slow = _time(lambda: driver(slow), repeat)
        rows.append((name, n, t_fast, t_slow, diff))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--kind", default="square", choices=("chain", "triangular", "square"))
    ap.add_argument("--extent", type=int, nargs="+", default=[16, 16])
    ap.add_argument("--sweeps", type=int, default=20)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    print(f"{'kernel':<11}{'sites':>7}{'numba [s]':>12}{'python [s]':>12}{'speedup':>9}{'max diff':>11}")
    for name, n, t_fast, t_slow, diff in run(args.kind, args.extent, args.sweeps, args.repeat):
        print(f"{name:<11}{n:>7}{t_fast:>12.4f}{t_slow:>12.4f}{t_slow / t_fast:>9.1f}{diff:>11.1e}")


if __name__ == "__main__":
    main()
