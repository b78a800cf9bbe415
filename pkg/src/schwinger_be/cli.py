"""Command-line interface: resource estimation, verification, dynamics,
and amplitude-estimation simulation as batch commands.

Exit codes: 0 success, 1 verification failure, 2 usage/configuration error.
All artifacts carry ``schema_version``; identical configuration and seed
produce identical bytes.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import ae, blockenc, estimator, model, subroutines
from .simulate import (check_basis_permutation, project_success,
                       register_weights, simulate_statevector)

SCHEMA_VERSION = 1

ESTIMATE_COLUMNS = ["n_sites", "wt", "epsilon", "t_count", "runtime_days",
                    "ancilla", "logical_qubits"]
DYNAMICS_COLUMNS = ["t", "re_g", "im_g", "abs_g", "nu"]
PHYSICAL_COLUMNS = ["n_sites", "wt", "p_phys", "t_count", "code_distance",
                    "logical_qubits", "physical_qubits"]


def _default_seed() -> int:
    return int(os.environ.get("SCHWINGER_BE_SEED", "0"))


def _emit(args, text: str) -> None:
    if args.output:
        with open(args.output, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _rows_to_text(rows: list[dict], columns: list[str], fmt: str) -> str:
    if fmt == "json":
        doc = {"schema_version": SCHEMA_VERSION, "rows": rows}
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["# schema_version", SCHEMA_VERSION])
    writer.writerow(columns)
    for row in rows:
        writer.writerow([row[c] for c in columns])
    return buf.getvalue()


def _params_or_exit(n: int) -> model.ModelParams:
    try:
        return model.benchmark_params(n)
    except ValueError as exc:
        raise SystemExit(2) from exc


def cmd_estimate(args) -> int:
    n_values = list(estimator.TABLE3_N) if args.N is None else args.N
    wt_values = list(estimator.TABLE3_WT) if args.wt is None else args.wt
    if not n_values or not wt_values or args.rate <= 0:
        print("error: empty grid or nonpositive rate", file=sys.stderr)
        return 2
    try:
        rows = estimator.table3(tuple(n_values), tuple(wt_values),
                                rate=args.rate)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = [{"n_sites": r.n_sites, "wt": r.wt, "epsilon": r.epsilon,
            "t_count": f"{r.t_count:.6e}",
            "runtime_days": f"{r.runtime_days:.6e}",
            "ancilla": r.ancilla, "logical_qubits": r.logical_qubits}
           for r in rows]
    _emit(args, _rows_to_text(out, ESTIMATE_COLUMNS, args.format))
    return 0


def _verify_arithmetic(bits: int) -> list[str]:
    failures = []
    refs = {
        "ineq": lambda v: {"out": v["out"] ^ (v["a"] <= v["b"])},
        "sub": lambda v: {"a": v["a"], "b": (v["a"] - v["b"]) % (1 << bits)},
        "una": lambda v: {"z": v["z"] ^ ((1 << v["a"].bit_length()) - 1)},
        "cswap": lambda v: ({"a": v["b"], "b": v["a"]} if v["ctrl"] == 1
                            else {"a": v["a"], "b": v["b"]}),
    }
    for kind, ref in refs.items():
        circ, _ = subroutines.arithmetic(kind, bits)
        verdict = check_basis_permutation(circ, ref)
        if not verdict.ok:
            failures.append(f"{kind}({bits}): {verdict.failures[:3]}")
    return failures


def _verify_subroutines() -> list[str]:
    failures = []
    for n in (3, 5, 6):
        circ, _ = subroutines.uni(n, 1e-3)
        psi = project_success(simulate_statevector(circ), circ)
        w = register_weights(psi, circ, "idx")
        target = np.zeros_like(w)
        target[:n] = 1.0 / n
        if np.max(np.abs(w / w.sum() - target)) > 1e-10:
            failures.append(f"uni({n}) profile off")
    for name, builder, support in (("p_s1", subroutines.p_s1, range(2, 8, 2)),
                                   ("p_s2", subroutines.p_s2, range(1, 8, 2))):
        circ, _ = builder(8, 1e-3)
        psi = project_success(simulate_statevector(circ), circ)
        w = register_weights(psi, circ, "out")
        target = np.zeros_like(w)
        for nn in support:
            target[nn] = nn
        target /= target.sum()
        if np.max(np.abs(w / w.sum() - target)) > 1e-10:
            failures.append(f"{name}(8) profile off")
    circ, _ = subroutines.p_s3(8, 1e-6)
    psi = project_success(simulate_statevector(circ), circ)
    w = register_weights(psi, circ, "out")
    target = np.arange(8.0) ** 2
    target /= target.sum()
    if np.max(np.abs(w / w.sum() - target)) > 1e-8:
        failures.append("p_s3(8) profile off")
    return failures


def cmd_verify(args) -> int:
    if args.suite == "arithmetic":
        failures = _verify_arithmetic(args.bits)
    elif args.suite == "subroutines":
        failures = _verify_subroutines()
    else:  # block
        if args.N % 2 != 0 or args.N < 8:
            print("error: N must be even and >= 8", file=sys.stderr)
            return 2
        if args.N > blockenc.SEMANTIC_LIMIT:
            print(f"error: semantic mode requires N <= "
                  f"{blockenc.SEMANTIC_LIMIT}", file=sys.stderr)
            return 2
        params = _params_or_exit(args.N)
        rec = blockenc.verify(params, args.epsilon, mode=args.mode)
        _emit(args, rec.to_json() + "\n")
        return 0 if rec.passed else 1
    report = {"schema_version": SCHEMA_VERSION, "suite": args.suite,
              "failures": failures, "passed": not failures}
    _emit(args, json.dumps(report, sort_keys=True, indent=2) + "\n")
    return 0 if not failures else 1


def cmd_dynamics(args) -> int:
    if args.N > model.DENSE_LIMIT:
        print(f"error: N exceeds the dense limit {model.DENSE_LIMIT}",
              file=sys.stderr)
        return 2
    params = _params_or_exit(args.N)
    ts = np.linspace(0.0, args.t_max, args.steps)
    rows = []
    for t in ts:
        g = model.vacuum_persistence(params, float(t))
        nu = model.particle_density(params, float(t))
        rows.append({"t": f"{t:.8f}", "re_g": f"{g.real:.12f}",
                     "im_g": f"{g.imag:.12f}", "abs_g": f"{abs(g):.12f}",
                     "nu": f"{nu:.12f}"})
    _emit(args, _rows_to_text(rows, DYNAMICS_COLUMNS, args.format))
    return 0


def cmd_ae(args) -> int:
    if args.hoeffding:
        _emit(args, json.dumps(
            {"schema_version": SCHEMA_VERSION,
             "hoeffding_queries": ae.hoeffding_queries(args.epsilon,
                                                       args.delta),
             "chebyshev_worst_case": ae.chebae_query_formula(args.epsilon)},
            sort_keys=True) + "\n")
        return 0
    omegas = ([round(0.1 * i, 1) for i in range(1, 10)]
              if args.omega is None else args.omega)
    if not omegas or any(not 0 <= om <= 1 for om in omegas):
        print("error: omega values must be in [0,1]", file=sys.stderr)
        return 2
    seed = args.seed if args.seed is not None else _default_seed()
    lines = []
    summary = {}
    for i, om in enumerate(omegas):
        runs = [ae.simulate_adaptive_ae(om, args.epsilon, args.delta,
                                        seed + 100_000 * i + r)
                for r in range(args.runs)]
        for r in runs:
            lines.append(json.dumps(
                {"schema_version": SCHEMA_VERSION, "seed": r.seed,
                 "omega": om, "estimate": round(r.estimate, 12),
                 "q_psi": r.q_psi, "q_pi": r.q_pi,
                 "succeeded": r.succeeded}, sort_keys=True))
        summary[str(om)] = {
            "mean_total_queries": float(np.mean([r.total_queries
                                                 for r in runs])),
            "failure_rate": float(np.mean([not r.succeeded for r in runs]))}
    lines.append(json.dumps({"schema_version": SCHEMA_VERSION,
                             "summary": summary}, sort_keys=True))
    _emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_physical(args) -> int:
    ps = [1e-3, 1e-4] if args.p_phys is None else args.p_phys
    if not ps or any(not 0 < p < 0.01 for p in ps):
        print("error: p_phys must lie in (0, 0.01)", file=sys.stderr)
        return 2
    n_values = [64] if args.N is None else args.N
    rows = []
    try:
        for n in n_values:
            params = model.benchmark_params(n)
            t = args.wt / params.w
            rep = estimator.vpa_cost(params, t)
            nl = estimator.logical_qubits(n)
            for p in ps:
                pe = estimator.physical_qubits(rep.t_real, nl, p)
                rows.append({"n_sites": n, "wt": args.wt, "p_phys": p,
                             "t_count": f"{rep.t_real:.6e}",
                             "code_distance": pe.code_distance,
                             "logical_qubits": pe.logical_qubits,
                             "physical_qubits": pe.physical_qubits})
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit(args, _rows_to_text(rows, PHYSICAL_COLUMNS, args.format))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="schwinger-be",
        description="Block-encoding resource estimates and verification "
                    "for the lattice Schwinger model.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--output", help="write to file instead of stdout")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("estimate", help="end-to-end T counts and runtimes")
    p.add_argument("--N", type=int, nargs="*")
    p.add_argument("--wt", type=float, nargs="*")
    p.add_argument("--rate", type=float, default=estimator.DEFAULT_T_RATE,
                   help="T gates per second for runtime conversion")
    common(p)
    p.set_defaults(fn=cmd_estimate)

    p = sub.add_parser("verify", help="construction-level verification")
    p.add_argument("--suite", choices=("block", "arithmetic", "subroutines"),
                   default="block")
    p.add_argument("--N", type=int, default=8)
    p.add_argument("--epsilon", type=float, default=1e-2)
    p.add_argument("--bits", type=int, default=6)
    p.add_argument("--mode", choices=("semantic", "full-statevector"),
                   default="semantic")
    common(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("dynamics", help="vacuum persistence time series")
    p.add_argument("--N", type=int, default=4)
    p.add_argument("--t-max", type=float, default=4.0)
    p.add_argument("--steps", type=int, default=41)
    common(p)
    p.set_defaults(fn=cmd_dynamics)

    p = sub.add_parser("ae", help="amplitude-estimation query simulation")
    p.add_argument("--epsilon", type=float, default=0.005)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--omega", type=float, nargs="*")
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--seed", type=int, default=None,
                   help="default from SCHWINGER_BE_SEED")
    p.add_argument("--hoeffding", action="store_true",
                   help="print the closed-form query counts only")
    common(p)
    p.set_defaults(fn=cmd_ae)

    p = sub.add_parser("physical", help="surface-code footprint")
    p.add_argument("--N", type=int, nargs="*")
    p.add_argument("--wt", type=float, default=10.0)
    p.add_argument("--p-phys", type=float, nargs="*")
    common(p)
    p.set_defaults(fn=cmd_physical)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
