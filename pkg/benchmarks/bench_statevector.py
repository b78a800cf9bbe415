#!/usr/bin/env python3
"""Benchmark the statevector kernels: numba-jitted vs pure-numpy fallback.

Runs the same randomized workload in two subprocesses, one with
``SCHWINGER_BE_NO_NUMBA=1``, and reports wall times.  The workload mixes the
hot kernel shapes: dense single-qubit updates (plain and multi-controlled),
pattern phases, and basis permutations.

    python benchmarks/bench_statevector.py --qubits 20 --depth 60 --repeat 3
"""
from __future__ import annotations

import argparse
import math
import os
import subprocess
import sys
import time


def build_circuit(n: int, depth: int, seed: int):
    import numpy as np
    from schwinger_be.circuit import Circuit
    rng = np.random.default_rng(seed)
    circ = Circuit()
    circ.add_register("q", n)
    kinds = ["H", "RY", "RZ", "CNOT", "CRY", "TOFFOLI", "REFLECT", "X",
             "ADDC"]
    for _ in range(depth):
        kind = kinds[rng.integers(len(kinds))]
        if kind in ("H", "RY", "RZ", "X"):
            circ.add(kind, (int(rng.integers(n)),),
                     angle=float(rng.uniform(0, 2 * math.pi)))
        elif kind in ("CNOT", "CRY"):
            q = tuple(rng.choice(n, size=2, replace=False).tolist())
            circ.add(kind, q, angle=float(rng.uniform(0, 2 * math.pi)))
        elif kind == "TOFFOLI":
            circ.add(kind, tuple(rng.choice(n, size=3, replace=False).tolist()))
        elif kind == "REFLECT":
            circ.add(kind, tuple(sorted(
                rng.choice(n, size=4, replace=False).tolist())))
        else:
            qs = tuple(sorted(rng.choice(n, size=6, replace=False).tolist()))
            circ.add("ADDC", qs, const=int(rng.integers(1, 40)), width=6)
    return circ


def run_child(args) -> None:
    from schwinger_be import backend
    from schwinger_be.simulate import simulate_statevector
    circ = build_circuit(args.qubits, args.depth, args.seed)
    simulate_statevector(circ, limit=args.qubits)  # warm-up (JIT compile)
    times = []
    for _ in range(args.repeat):
        t0 = time.perf_counter()
        state = simulate_statevector(circ, limit=args.qubits)
        times.append(time.perf_counter() - t0)
    label = "numba" if backend.USE_NUMBA else "numpy"
    print(f"{label:>6}: best {min(times):.3f} s over {args.repeat} runs "
          f"(norm {abs(sum(abs(state) ** 2)):.12f})")


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--qubits", type=int, default=20)
    ap.add_argument("--depth", type=int, default=60)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--child", action="store_true")
    args = ap.parse_args()
    if args.child:
        run_child(args)
        return 0
    base = [sys.executable, __file__, "--child",
            "--qubits", str(args.qubits), "--depth", str(args.depth),
            "--repeat", str(args.repeat), "--seed", str(args.seed)]
    print(f"statevector benchmark: {args.qubits} qubits, depth {args.depth}",
          flush=True)
    for flag in ("0", "1"):
        env = dict(os.environ, SCHWINGER_BE_NO_NUMBA=flag)
        subprocess.run(base, env=env, check=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
