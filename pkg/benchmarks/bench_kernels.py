"""Compare the compiled and numpy statevector kernels.

    python benchmarks/bench_kernels.py [--repeats 5]

Times one V_BS step (and a batch of steps) for several register sizes and
checks that both backends produce the same state.
"""
from __future__ import annotations

import argparse
import math
import time

import numpy as np

from schrobs.circuits import build_vbs
from schrobs.fd import BsParams1D, SpatialGrid, assemble_bs_1d
from schrobs.schrodinger import build_pgrid, dilate
from schrobs.simulator.state import BACKEND, compile_circuit, run_program


def bench(n_x: int, n_p: int, steps: int, repeats: int):
    sys = assemble_bs_1d(BsParams1D(0.02, 0.3, 30.0, 1.0),
                         SpatialGrid(math.log(1e-4), math.log(300.0), n_x))
    circ = build_vbs(1e-3, dilate(sys, "auto"), build_pgrid(4, n_p))
    prog = compile_circuit(circ)
    rng = np.random.default_rng(0)
    psi0 = rng.normal(size=2**circ.width) + 1j * rng.normal(size=2**circ.width)
    psi0 /= np.linalg.norm(psi0)
    out = {}
    for backend in ("compiled", "python"):
        best = float("inf")
        for _ in range(repeats):
            psi = psi0.copy()
            t0 = time.perf_counter()
            run_program(psi, prog, steps, backend)
            best = min(best, time.perf_counter() - t0)
        out[backend] = (best, psi)
    diff = float(np.max(np.abs(out["compiled"][1] - out["python"][1])))
    return circ.width, len(prog), out["compiled"][0], out["python"][0], diff


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()
    if BACKEND != "compiled":
        raise SystemExit("compiled kernels are not built; run pip install -e . first")
    print(f"{'n_x':>3} {'n_p':>3} {'qubits':>6} {'gates':>6} {'steps':>5} "
          f"{'compiled s':>11} {'python s':>9} {'speedup':>7} {'max diff':>9}")
    for n_x, n_p, steps in [(3, 3, 100), (4, 4, 50), (6, 6, 10), (7, 8, 1)]:
        w, g, tc, tp, diff = bench(n_x, n_p, steps, args.repeats)
        print(f"{n_x:>3} {n_p:>3} {w:>6} {g:>6} {steps:>5} {tc:>11.4f} {tp:>9.4f} "
              f"{tp / tc:>7.1f} {diff:>9.1e}")


if __name__ == "__main__":
    main()
