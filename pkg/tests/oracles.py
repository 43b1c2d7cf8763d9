"""Independent reference implementations used only by the tests."""

from __future__ import annotations

import math

import networkx as nx
import numpy as np

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)


def u3_matrix(theta, phi, lam):
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -np.exp(1j * lam) * s],
                     [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]], dtype=complex)


def _apply_1q(state, k, mat, q):
    # state has shape (2,)*k + (cols,); axis q is qubit q
    state = np.moveaxis(state, q, 0)
    state = np.tensordot(mat, state, axes=([1], [0]))
    return np.moveaxis(state, 0, q)


def _apply_controlled(state, controls, target, mat):
    idx = [slice(None)] * state.ndim
    for c in controls:
        idx[c] = 1
    sub = state[tuple(idx)]
    # target axis index shifts down by the number of fixed control axes before it
    t = target - sum(1 for c in controls if c < target)
    sub = np.moveaxis(np.tensordot(mat, np.moveaxis(sub, t, 0), axes=([1], [0])), 0, t)
    state = state.copy()
    state[tuple(idx)] = sub
    return state


def apply_gate(state, kind, qubits, params=()):
    if kind == "h":
        return _apply_1q(state, None, _H, qubits[0])
    if kind == "u3":
        return _apply_1q(state, None, u3_matrix(*params), qubits[0])
    if kind in ("cz", "ccz", "cccz"):
        idx = [slice(None)] * state.ndim
        for q in qubits:
            idx[q] = 1
        state = state.copy()
        state[tuple(idx)] *= -1
        return state
    if kind in ("cx", "ccx", "cccx"):
        return _apply_controlled(state, qubits[:-1], qubits[-1], _X)
    if kind == "swap":
        return np.swapaxes(state, qubits[0], qubits[1])
    raise ValueError(kind)


def circuit_unitary(n, gates):
    """Dense unitary, qubit 0 as the most significant bit; gates are
    (kind, qubits, params) triples."""
    dim = 2 ** n
    state = np.eye(dim, dtype=complex).reshape((2,) * n + (dim,))
    for kind, qubits, params in gates:
        state = apply_gate(state, kind, qubits, params)
    return state.reshape(dim, dim)


def replay_physical(ops, n, initial_c2p, final_c2p):
    """Run physical gate ops (kind, physical qubits, params) for every circuit
    basis input and read the result back through the final assignment.

    Physical qubits that host no circuit qubit start in |0>. Returns the
    effective n-qubit matrix and the probability weight that leaked outside
    the subspace where non-hosting atoms read |0>.
    """
    touched = sorted({p for _, qs, _ in ops for p in qs} | set(initial_c2p) | set(final_c2p))
    local = {p: i for i, p in enumerate(touched)}
    k = len(touched)
    dim_n = 2 ** n
    state = np.zeros((2 ** k, dim_n), dtype=complex)
    for col in range(dim_n):
        bits = [(col >> (n - 1 - q)) & 1 for q in range(n)]
        idx = 0
        for q, b in enumerate(bits):
            if b:
                idx |= 1 << (k - 1 - local[initial_c2p[q]])
        state[idx, col] = 1
    state = state.reshape((2,) * k + (dim_n,))
    for kind, qs, params in ops:
        state = apply_gate(state, kind, [local[p] for p in qs], params)
    out = np.zeros((dim_n, dim_n), dtype=complex)
    flat = state.reshape(2 ** k, dim_n)
    for row in range(dim_n):
        idx = 0
        for q in range(n):
            if (row >> (n - 1 - q)) & 1:
                idx |= 1 << (k - 1 - local[final_c2p[q]])
        out[row] = flat[idx]
    leak = max(0.0, 1.0 - float(np.min(np.sum(np.abs(out) ** 2, axis=0))))
    return out, leak


def phase_distance(a, b) -> float:
    """Max elementwise |a - e^{i phi} b| with phi fitted on the largest entry."""
    i = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(b[i]) < 1e-12:
        return float(np.max(np.abs(a - b)))
    phase = a[i] / b[i]
    phase /= abs(phase) if abs(phase) > 0 else 1
    return float(np.max(np.abs(a - phase * b)))


def connectivity_graph(positions, r_int, tol=1e-9):
    g = nx.Graph()
    g.add_nodes_from(range(len(positions)))
    for a in range(len(positions)):
        for b in range(a + 1, len(positions)):
            (xa, ya), (xb, yb) = positions[a], positions[b]
            if math.hypot(xa - xb, ya - yb) <= r_int + tol:
                g.add_edge(a, b)
    return g


def swap_distance(positions, r_int, a, b):
    g = connectivity_graph(positions, r_int)
    try:
        return nx.shortest_path_length(g, a, b) - 1
    except nx.NetworkXNoPath:
        return math.inf


def simulate_layout(positions, moves):
    """Apply (qubit, dst) moves to a position list, asserting targets are free."""
    pos = list(positions)
    for q, dst in moves:
        assert tuple(dst) not in {tuple(p) for p in pos}, f"move onto occupied {dst}"
        pos[q] = tuple(dst)
    return pos


def random_move_set(rng, l, max_moves=16, shared_displacement=None):
    """A random sequence of valid single-atom moves on an l x l lattice.

    Returns (start positions, moves, final positions). With a shared
    displacement most moves are groupable; otherwise each move gets its own.
    """
    from hybridmap.hardware import Coordinate
    from hybridmap.shuttle_router import Move

    sites = [Coordinate(x, y) for y in range(l) for x in range(l)]
    na = rng.randint(2, l * l - 1)
    pos = dict(enumerate(rng.sample(sites, na)))
    start = dict(pos)
    shared = shared_displacement if shared_displacement is not None else rng.random() < 0.6
    disp = (rng.randint(-2, 2), rng.randint(-2, 2)) or (1, 0)
    if disp == (0, 0):
        disp = (1, 0)
    moves = []
    for _ in range(rng.randint(1, max_moves)):
        q = rng.randrange(na)
        if shared:
            dx, dy = disp
        else:
            dx, dy = rng.randint(-l + 1, l - 1), rng.randint(-l + 1, l - 1)
        dst = Coordinate(pos[q].x + dx, pos[q].y + dy)
        if (dx, dy) == (0, 0) or not (0 <= dst.x < l and 0 <= dst.y < l) or dst in pos.values():
            continue
        moves.append(Move(q, pos[q], dst))
        pos[q] = dst
    return start, moves, pos


ARITIES = {"u3": 1, "h": 1, "cx": 2, "cz": 2, "ccx": 3, "ccz": 3, "cccx": 4, "cccz": 4}


def random_circuit(rng, n, m):
    from hybridmap.circuit import GateNode, QuantumCircuit

    kinds = [k for k, a in ARITIES.items() if a <= n]
    gates = []
    for i in range(m):
        k = rng.choice(kinds)
        params = tuple(rng.uniform(-math.pi, math.pi) for _ in range(3)) if k == "u3" else ()
        gates.append(GateNode(k, tuple(rng.sample(range(n), ARITIES[k])), params, i))
    return QuantumCircuit(n, gates)


def mapped_deviation(circuit, evaluation):
    """(phase-fitted deviation, leak) between the circuit unitary and the
    scheduled program replayed in start-time order."""
    prog = evaluation.program
    order = sorted(range(len(prog.ops)), key=lambda i: (prog.ops[i].start, i))
    ops = [(prog.ops[i].kind, prog.ops[i].qubits, prog.ops[i].params) for i in order
           if prog.ops[i].kind != "aod"]
    u = circuit_unitary(circuit.n, [(g.kind, g.qubits, g.params) for g in circuit.gates])
    v, leak = replay_physical(ops, circuit.n, evaluation.mapping.initial.c2p, evaluation.mapping.final.c2p)
    return phase_distance(v, u), leak
