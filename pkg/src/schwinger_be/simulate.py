"""Exact evaluators for the circuit IR.

Two paths: a dense statevector simulator (rotations applied as exact
matrices; synthesis error lives only in the cost model), and a
basis-permutation fast path for arithmetic circuits, which maps integer
basis indices directly and never touches amplitudes.

Qubit 0 is the most significant bit of the basis index, so a register's
value reads its qubits left to right.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import backend
from .circuit import Circuit, Gate, PERMUTATION_KINDS

SIMULATION_LIMIT = 24

_SQ2 = 1 / math.sqrt(2)
_MAT_1Q = {
    "H": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "T": np.array([[1, 0], [0, np.exp(1j * math.pi / 4)]], dtype=complex),
}


def _ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(theta: float) -> np.ndarray:
    return np.array([[np.exp(-1j * theta / 2), 0],
                     [0, np.exp(1j * theta / 2)]], dtype=complex)


def _bit(n: int, q: int) -> int:
    return 1 << (n - 1 - q)


def _mask(n: int, qubits) -> int:
    m = 0
    for q in qubits:
        m |= _bit(n, q)
    return m


def _place(n: int, qubits, value: int) -> int:
    """Spread ``value`` (MSB-first over ``qubits``) into index-bit positions."""
    out = 0
    w = len(qubits)
    for k, q in enumerate(qubits):
        if (value >> (w - 1 - k)) & 1:
            out |= _bit(n, q)
    return out


def reg_values(idx: np.ndarray, n: int, qubits) -> np.ndarray:
    """Extract the register value from basis indices (vectorized)."""
    w = len(qubits)
    out = np.zeros_like(idx)
    for k, q in enumerate(qubits):
        out |= ((idx >> (n - 1 - q)) & 1) << (w - 1 - k)
    return out


def _set_values(idx: np.ndarray, n: int, qubits, values: np.ndarray) -> np.ndarray:
    w = len(qubits)
    out = idx & ~_mask(n, qubits)
    for k, q in enumerate(qubits):
        out |= ((values >> (w - 1 - k)) & 1) << (n - 1 - q)
    return out


def _una(a: np.ndarray) -> np.ndarray:
    """Ones from the most significant set bit of ``a`` downward."""
    bl = np.where(a > 0,
                  np.floor(np.log2(np.maximum(a, 1))).astype(np.int64) + 1, 0)
    return (1 << bl) - 1


def _split_groups(g: Gate):
    qs = g.qubits
    groups = []
    pos = 0
    for s in g.splits:
        groups.append(qs[pos:pos + s])
        pos += s
    groups.append(qs[pos:])
    return groups


def gate_index_map(g: Gate, n: int, idx: np.ndarray) -> np.ndarray | None:
    """Image of basis indices under a permutation gate; None if not one."""
    k = g.kind
    if k == "X":
        return idx ^ _bit(n, g.qubits[0])
    if k == "CNOT":
        c, t = g.qubits
        fire = (idx >> (n - 1 - c)) & 1
        return idx ^ (fire << (n - 1 - t))
    if k == "TOFFOLI":
        c1, c2, t = g.qubits
        fire = ((idx >> (n - 1 - c1)) & 1) & ((idx >> (n - 1 - c2)) & 1)
        return idx ^ (fire << (n - 1 - t))
    if k == "MCX":
        ctrls, t = g.qubits[:-1], g.qubits[-1]
        fire = np.ones_like(idx)
        for c in ctrls:
            fire &= (idx >> (n - 1 - c)) & 1
        return idx ^ (fire << (n - 1 - t))
    if k == "SWAP":
        a, b = g.qubits
        va = (idx >> (n - 1 - a)) & 1
        vb = (idx >> (n - 1 - b)) & 1
        diff = va ^ vb
        return idx ^ (diff << (n - 1 - a)) ^ (diff << (n - 1 - b))
    if k in ("CSWAP", "CCSWAP"):
        nc = 1 if k == "CSWAP" else 2
        s = g.width
        ctrls = g.qubits[:nc]
        a, b = g.qubits[nc:nc + s], g.qubits[nc + s:nc + 2 * s]
        fire = np.ones_like(idx)
        for c in ctrls:
            fire &= (idx >> (n - 1 - c)) & 1
        va, vb = reg_values(idx, n, a), reg_values(idx, n, b)
        na = np.where(fire == 1, vb, va)
        nb = np.where(fire == 1, va, vb)
        return _set_values(_set_values(idx, n, a, na), n, b, nb)
    if k == "INEQ":
        sa, sb = g.splits
        a = g.qubits[:sa]
        b = g.qubits[sa:sa + sb]
        out = g.qubits[sa + sb]
        va, vb = reg_values(idx, n, a), reg_values(idx, n, b)
        cond = (va <= vb).astype(idx.dtype)
        return idx ^ (cond << (n - 1 - out))
    if k == "SUB":
        s = g.width
        a, b = g.qubits[:s], g.qubits[s:2 * s]
        va, vb = reg_values(idx, n, a), reg_values(idx, n, b)
        return _set_values(idx, n, b, (va - vb) % (1 << s))
    if k == "ADDC":
        s = g.width
        v = reg_values(idx, n, g.qubits)
        return _set_values(idx, n, g.qubits, (v + g.const) % (1 << s))
    if k == "UNA":
        s = g.width
        a, z = g.qubits[:s], g.qubits[s:2 * s]
        va = reg_values(idx, n, a)
        vz = reg_values(idx, n, z)
        return _set_values(idx, n, z, vz ^ _una(va))
    return None


def _apply_select(state: np.ndarray, g: Gate, n: int) -> None:
    nc, ba = g.splits
    ctrls = g.qubits[:nc]
    addr = g.qubits[nc:nc + ba]
    sys = g.qubits[nc + ba:]
    idx = np.arange(state.shape[0])
    cmask = _mask(n, ctrls)
    cval = _place(n, ctrls, g.pattern if g.pattern >= 0 else (1 << nc) - 1)
    amask = _mask(n, addr)
    for a in range(g.n_terms):
        sel = ((idx & cmask) == cval) & ((idx & amask) == _place(n, addr, a))
        if not sel.any():
            continue
        sub = idx[sel]
        if g.kind in ("SEL_XX", "SEL_YY"):
            b0, b1 = _bit(n, sys[a]), _bit(n, sys[a + 1])
            if g.kind == "SEL_YY":
                x0 = (sub & b0) != 0
                x1 = (sub & b1) != 0
                phase = np.where(x0 == x1, -1.0, 1.0)
            else:
                phase = 1.0
            amps = state[sub] * phase
            state[sub] = 0.0
            state[sub ^ b0 ^ b1] = amps
        elif g.kind == "SEL_Z":
            b0 = _bit(n, sys[a])
            sign = np.where((sub & b0) != 0, -1.0, 1.0) * ((-1.0) ** a)
            state[sub] *= sign
        elif g.kind == "SEL_Z2":
            b0 = _bit(n, sys[a])
            state[sub] *= np.where((sub & b0) != 0, -1.0, 1.0)
        else:  # pragma: no cover
            raise ValueError(g.kind)


def simulate_statevector(circuit: Circuit, input_state=None,
                         limit: int = SIMULATION_LIMIT) -> np.ndarray:
    """Exact amplitudes of ``circuit`` applied to a basis state or vector."""
    n = circuit.n_qubits
    if n > limit:
        raise ValueError(f"{n} qubits exceeds the simulation limit {limit}")
    dim = 1 << n
    if input_state is None:
        state = np.zeros(dim, dtype=complex)
        state[0] = 1.0
    elif np.isscalar(input_state):
        state = np.zeros(dim, dtype=complex)
        state[int(input_state)] = 1.0
    else:
        state = np.asarray(input_state, dtype=complex).copy()
        if state.shape != (dim,):
            raise ValueError("input state has wrong dimension")
    idx = np.arange(dim)
    for g in circuit.gates:
        k = g.kind
        if k == "COMPOSITE":
            raise ValueError("composite nodes carry costs only and cannot "
                             "be simulated")
        if k in ("SEL_XX", "SEL_YY", "SEL_Z", "SEL_Z2"):
            _apply_select(state, g, n)
            continue
        if k in ("REFLECT", "PHASE0"):
            mask = _mask(n, g.qubits)
            pat = g.pattern if g.pattern >= 0 else 0
            val = _place(n, g.qubits, pat)
            if k == "REFLECT":
                state *= -1.0
                backend.apply_phase_pattern(state, mask, val, -1.0)
            else:
                backend.apply_phase_pattern(state, mask, val,
                                            np.exp(1j * g.angle))
            continue
        perm = gate_index_map(g, n, idx)
        if perm is not None:
            backend.apply_permutation(state, perm)
            continue
        if k in ("RY", "RZ"):
            mat = _ry(g.angle) if k == "RY" else _rz(g.angle)
            backend.apply_1q_ctrl(state, mat, _bit(n, g.qubits[0]))
        elif k in ("CRY", "CRZ"):
            mat = _ry(g.angle) if k == "CRY" else _rz(g.angle)
            c, t = g.qubits
            backend.apply_1q_ctrl(state, mat, _bit(n, t), _bit(n, c),
                                  _bit(n, c))
        elif k == "CH":
            c, t = g.qubits
            backend.apply_1q_ctrl(state, _MAT_1Q["H"], _bit(n, t),
                                  _bit(n, c), _bit(n, c))
        elif k == "CZ":
            mask = _mask(n, g.qubits)
            backend.apply_phase_pattern(state, mask, mask, -1.0)
        elif k in _MAT_1Q:
            backend.apply_1q_ctrl(state, _MAT_1Q[k], _bit(n, g.qubits[0]))
        else:  # pragma: no cover
            raise ValueError(f"cannot simulate gate kind {k}")
    return state


def to_unitary(circuit: Circuit, limit: int = 12) -> np.ndarray:
    n = circuit.n_qubits
    if n > limit:
        raise ValueError("to_unitary limited to small circuits")
    dim = 1 << n
    cols = [simulate_statevector(circuit, j) for j in range(dim)]
    return np.stack(cols, axis=1)


# -- basis-permutation verification ------------------------------------------


@dataclass
class PermutationVerdict:
    ok: bool
    checked: int
    failures: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def circuit_index_map(circuit: Circuit, idx: np.ndarray) -> np.ndarray:
    n = circuit.n_qubits
    cur = idx
    for g in circuit.gates:
        if g.kind not in PERMUTATION_KINDS:
            raise ValueError(
                f"{g.kind} creates superpositions; basis-permutation check "
                f"requires X/CNOT/Toffoli/MultiControlledX/arithmetic gates")
        cur = gate_index_map(g, n, cur)
    return cur


def check_basis_permutation(circuit: Circuit, reference, *,
                            exhaustive_limit: int = 17,
                            samples: int = 4096,
                            seed: int = 7,
                            max_failures: int = 10) -> PermutationVerdict:
    """Confirm the circuit equals ``reference`` on computational basis states.

    ``reference`` maps a dict of register values to a dict of expected
    register values (registers it omits must be unchanged is not enforced;
    only returned registers are compared).  Exhaustive below
    ``exhaustive_limit`` qubits, sampled above.
    """
    n = circuit.n_qubits
    if n <= exhaustive_limit:
        idx = np.arange(1 << n, dtype=np.int64)
    else:
        rng = np.random.default_rng(seed)
        idx = rng.integers(0, 1 << n, size=samples, dtype=np.int64)
    out = circuit_index_map(circuit, idx)
    regs = {name: r.qubits for name, r in circuit.registers.items()}
    invals = {name: reg_values(idx, n, qs) for name, qs in regs.items()}
    outvals = {name: reg_values(out, n, qs) for name, qs in regs.items()}
    failures = []
    for i in range(idx.shape[0]):
        vin = {name: int(v[i]) for name, v in invals.items()}
        expect = reference(vin)
        for name, want in expect.items():
            got = int(outvals[name][i])
            if got != want:
                failures.append((vin, name, want, got))
                if len(failures) >= max_failures:
                    return PermutationVerdict(False, idx.shape[0], failures)
    return PermutationVerdict(not failures, idx.shape[0], failures)


# -- success projection helpers ----------------------------------------------


def project_success(state: np.ndarray, circuit: Circuit,
                    conditions=None) -> np.ndarray:
    """Apply the circuit's success projection; returns an unnormalized state.

    Conditions are ``("bit", qubit, value)`` or ``("ry", qubit, angle,
    value)``; the latter rotates the qubit before projecting, which is how
    deferred flag rotations are folded into measurement.
    """
    n = circuit.n_qubits
    conds = circuit.metadata.get("success", []) if conditions is None else conditions
    out = state.copy()
    idx = np.arange(out.shape[0])
    for cond in conds:
        if cond[0] == "ry":
            _, q, angle, val = cond
            backend.apply_1q_ctrl(out, _ry(angle), _bit(n, q))
        else:
            _, q, val = cond
        keep = ((idx >> (n - 1 - q)) & 1) == val
        out[~keep] = 0.0
    return out


def register_weights(state: np.ndarray, circuit: Circuit, reg: str) -> np.ndarray:
    """Squared norm of the state grouped by a register's value."""
    n = circuit.n_qubits
    qs = circuit.registers[reg].qubits
    idx = np.arange(state.shape[0])
    vals = reg_values(idx, n, qs)
    w = np.zeros(1 << len(qs))
    np.add.at(w, vals, np.abs(state) ** 2)
    return w


def register_overlap(state: np.ndarray, circuit: Circuit, reg: str,
                     target: np.ndarray) -> float:
    """|<target (x) anything | state>| / ||state||.

    Equals 1 exactly when the register factors out in the target state.
    """
    n = circuit.n_qubits
    qs = circuit.registers[reg].qubits
    idx = np.arange(state.shape[0])
    vals = reg_values(idx, n, qs)
    rest = np.zeros(state.shape[0] // (1 << len(qs)), dtype=complex)
    # accumulate conj(target_v) * amp into the co-register component
    pos = idx & ~_mask(n, qs)
    # compress co-register indices to a dense range
    order = {}
    comp = np.empty_like(pos)
    next_id = 0
    for p in np.unique(pos):
        order[p] = next_id
        next_id += 1
    comp = np.array([order[p] for p in pos])
    np.add.at(rest, comp, np.conj(target[vals]) * state)
    norm = np.linalg.norm(state)
    return float(np.linalg.norm(rest) / norm) if norm > 0 else 0.0
