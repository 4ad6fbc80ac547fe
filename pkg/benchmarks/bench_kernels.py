#!/usr/bin/env python3
"""Benchmark the amplitude-amplification backends.

Compares, per register size:
  dense   -- materialise the 2^n x 2^n operator and apply it by matvec
             (only up to the dense ceiling)
  python  -- numpy two-reflection sweep (fallback backend)
  cython  -- compiled two-reflection sweep (when built)

Usage: python benchmarks/bench_kernels.py [--qubits 6 8 10 12 14 16] [--iters 50]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from qfair._kernels import _grover_py

try:
    from qfair._kernels import _grover_cy
except ImportError:
    _grover_cy = None

from qfair.amplification import DENSE_QUBIT_LIMIT, apply_grover_iterations
from qfair.fairness import PartitionSpec
from qfair.linalg import StateVector


def make_case(n: int, rng: np.random.Generator):
    probs = rng.dirichlet(np.ones(2**n))
    psi = StateVector(np.sqrt(probs).astype(complex))
    mask = PartitionSpec(clauses=((1, 1),)).designated_mask(n)
    return psi, mask


def time_call(fn, repeats: int = 3) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--qubits", type=int, nargs="+", default=[6, 8, 10, 12, 14, 16])
    parser.add_argument("--iters", type=int, default=50, help="sweep iterations per run")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    print(f"{'qubits':>6} {'dense':>12} {'python':>12} {'cython':>12} {'speedup':>9}")
    for n in args.qubits:
        psi, mask = make_case(n, rng)
        marked = mask.astype(np.uint8)
        row = [f"{n:>6}"]

        if n <= DENSE_QUBIT_LIMIT:
            t = time_call(lambda: apply_grover_iterations(psi, mask, args.iters, method="dense"))
            row.append(f"{t*1e3:>10.2f}ms")
        else:
            row.append(f"{'-':>12}")

        t_py = time_call(lambda: _grover_py.grover_sweep(psi.amplitudes, marked, psi.amplitudes, args.iters))
        row.append(f"{t_py*1e3:>10.2f}ms")

        if _grover_cy is not None:
            t_cy = time_call(lambda: _grover_cy.grover_sweep(psi.amplitudes, marked, psi.amplitudes, args.iters))
            row.append(f"{t_cy*1e3:>10.2f}ms")
            row.append(f"{t_py/t_cy:>8.2f}x")
        else:
            row.append(f"{'not built':>12}")
            row.append(f"{'-':>9}")
        print(" ".join(row))


if __name__ == "__main__":
    main()
