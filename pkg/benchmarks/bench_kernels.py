"""
Compare the numba kernels with their numpy fallbacks.

Run with ``python3 benchmarks/bench_kernels.py [--quick]``. Each kernel is
run once to compile, then timed; the outputs of both backends are checked
for agreement.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from quantumwalks import _kernels
from quantumwalks._backend import HAVE_NUMBA
from quantumwalks.classical import StochasticMatrix
from quantumwalks.graph_walks import Graph
from quantumwalks.line_walks import hadamard_matrix


def timed(fn, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(quick: bool):
    h = hadamard_matrix()
    c0 = np.array([1.0, 0.0], dtype=np.complex128)
    steps = 2_000 if quick else 20_000
    width = steps + 2

    def absorb(backend):
        return _kernels.absorbing_run(h, c0, width, 1, 0, -1, steps, backend=backend)

    n_traj = 200 if quick else 2_000

    def traj(backend):
        return _kernels.trajectory_sum(h, c0, 100, 0.1, 0.0, 0.05, 1.0, 7, n_traj, backend=backend)

    P = StochasticMatrix.from_graph(Graph.cycle(64))
    indptr, indices, cum = P.csr()
    mask = np.zeros(64, dtype=bool)
    mask[32] = True
    n_hit = 500 if quick else 5_000

    def hit(backend):
        return _kernels.hitting_steps(indptr, indices, cum, 0, mask, n_hit, 10**7, 3, backend=backend)

    return [
        (f"absorbing walk, T={steps}", absorb),
        (f"decoherence trajectories x{n_traj}", traj),
        (f"hitting times x{n_hit}", hit),
    ]


def agree(a, b) -> float:
    a = a if isinstance(a, tuple) else (a,)
    b = b if isinstance(b, tuple) else (b,)
    return max(float(np.max(np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))))
               for x, y in zip(a, b))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args()
    if not HAVE_NUMBA:
        print("numba is not installed; only the numpy fallback is available")
    print(f"{'kernel':38s} {'numpy [s]':>10s} {'numba [s]':>10s} {'speedup':>8s} {'max diff':>10s}")
    for name, fn in cases(args.quick):
        t_np, out_np = timed(lambda: fn("numpy"), repeat=1)
        if HAVE_NUMBA:
            fn("numba")
            t_nb, out_nb = timed(lambda: fn("numba"))
            print(f"{name:38s} {t_np:10.3f} {t_nb:10.3f} {t_np / t_nb:8.1f} {agree(out_np, out_nb):10.2e}")
        else:
            print(f"{name:38s} {t_np:10.3f} {'-':>10s}")


if __name__ == "__main__":
    main()
