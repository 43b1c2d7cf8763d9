"""Deterministic benchmark circuit generators (QFT, QPE, graph states,
random reversible logic)."""

from __future__ import annotations

import math
import random

from .circuit import C2X, C3X, CX, CZ, H, U3, GateNode, QuantumCircuit


class _Builder:
    def __init__(self, n: int):
        self.n = n
        self.gates: list[GateNode] = []

    def add(self, kind, qubits, params=()):
        self.gates.append(GateNode(kind, tuple(qubits), tuple(params), id=len(self.gates)))

    def phase(self, q, lam):
        self.add(U3, (q,), (0.0, 0.0, lam))

    def cphase(self, control, target, theta):
        self.phase(control, theta / 2)
        self.add(CX, (control, target))
        self.phase(target, -theta / 2)
        self.add(CX, (control, target))
        self.phase(target, theta / 2)

    def qft(self, qubits, inverse=False):
        ops = []
        for j, qj in enumerate(qubits):
            ops.append((H, qj, None, None))
            for k in range(j + 1, len(qubits)):
                ops.append(("cp", qubits[k], qj, math.pi / 2 ** (k - j)))
        if inverse:
            ops.reverse()
        for kind, a, b, theta in ops:
            if kind == H:
                self.add(H, (a,))
            else:
                self.cphase(a, b, -theta if inverse else theta)

    def build(self) -> QuantumCircuit:
        return QuantumCircuit(self.n, self.gates)


def qft(n: int) -> QuantumCircuit:
    """QFT without the final qubit reversal; n(n-1)/2 controlled phases."""
    b = _Builder(n)
    b.qft(list(range(n)))
    return b.build()


def qpe(n: int, phase: float = 1 / 3) -> QuantumCircuit:
    """Phase estimation of a single-qubit phase gate with n-1 counting qubits."""
    b = _Builder(n)
    target = n - 1
    counting = list(range(n - 1))
    b.add(U3, (target,), (math.pi, 0.0, math.pi))  # X, prepares the eigenstate |1>
    for q in counting:
        b.add(H, (q,))
    for j, q in enumerate(counting):
        b.cphase(q, target, 2 * math.pi * phase * 2 ** j)
    b.qft(counting, inverse=True)
    return b.build()


def graph_state(n: int, chords: int | None = None, seed: int = 7) -> QuantumCircuit:
    """Graph state on a ring plus ``chords`` random extra edges."""
    rng = random.Random(seed)
    b = _Builder(n)
    for q in range(n):
        b.add(H, (q,))
    edges = [(q, (q + 1) % n) for q in range(n)] if n > 2 else ([(0, 1)] if n == 2 else [])
    have = {frozenset(e) for e in edges}
    target = len(edges) + (n // 2 if chords is None else chords)
    while len(have) < min(target, n * (n - 1) // 2):
        e = frozenset(rng.sample(range(n), 2))
        if e not in have:
            have.add(e)
            edges.append(tuple(sorted(e)))
    for a, c in edges:
        b.add(CZ, (a, c))
    return b.build()


def reversible(n: int, n_gates: int, seed: int = 11, weights=(0.5, 0.3, 0.2)) -> QuantumCircuit:
    """Random cx / ccx / cccx network (reversible logic)."""
    rng = random.Random(seed)
    b = _Builder(n)
    kinds = [(CX, 2), (C2X, 3), (C3X, 4)]
    kinds = [k for k in kinds if k[1] <= n]
    w = list(weights[:len(kinds)])
    for _ in range(n_gates):
        kind, m = rng.choices(kinds, weights=w)[0]
        b.add(kind, rng.sample(range(n), m))
    return b.build()


BENCHMARKS = {
    "qft_20": lambda: qft(20),
    "qpe_20": lambda: qpe(20),
    "graph_20": lambda: graph_state(20),
    "rev_10": lambda: reversible(10, 40, seed=10),
    "rev_20": lambda: reversible(20, 60, seed=20),
}
