import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hybridmap.circuit import (C2Z, C3Z, CZ, H, U3, GateNode, QasmError, QuantumCircuit,
                               build_dag, commutes, decompose_to_native, parse_circuit)
from oracles import circuit_unitary, phase_distance


def g(kind, qubits, params=(), i=0):
    return GateNode(kind, tuple(qubits), tuple(params), i)


def unitary(n, gates):
    return circuit_unitary(n, [(x.kind, x.qubits, x.params) for x in gates])


def test_parse_single_cz():
    c = parse_circuit("qreg q[2]; cz q[0],q[1];")
    assert c.n == 2
    assert [(x.kind, x.qubits) for x in c.gates] == [(CZ, (0, 1))]


def test_parse_duplicate_qubit_rejected():
    with pytest.raises(QasmError):
        parse_circuit("qreg q[2];\ncz q[0],q[0];")


def test_parse_errors_carry_line_numbers():
    with pytest.raises(QasmError) as e:
        parse_circuit("qreg q[2];\nh q[0];\nrx(0.1) q[1];")
    assert e.value.line == 3
    with pytest.raises(QasmError) as e:
        parse_circuit("qreg q[2];\n\ncz q[0],q[2];")
    assert e.value.line == 3
    with pytest.raises(QasmError):
        parse_circuit("qreg q[2]; cz q[0] q[1];")


def test_parse_full_listing():
    text = """OPENQASM 2.0;
include "qelib1.inc";
qreg a[2];
qreg b[3];   // second register continues numbering
creg c[5];
u3(pi/2, -pi/4, 2*pi) a[1];
u(0,0,0.5) b[0];
h b[2]; barrier a[0],b[0];
cx a[0],b[1];
ccx a[0],a[1],b[0];
cccz a[0],a[1],b[0],b[2];
"""
    c = parse_circuit(text)
    assert c.n == 5
    kinds = [(x.kind, x.qubits) for x in c.gates]
    assert kinds == [("u3", (1,)), ("u3", (2,)), ("h", (4,)), ("cx", (0, 3)),
                     ("ccx", (0, 1, 2)), ("cccz", (0, 1, 2, 4))]
    assert c.gates[0].params == pytest.approx((math.pi / 2, -math.pi / 4, 2 * math.pi))
    assert [x.id for x in c.gates] == list(range(6))


def test_qasm_round_trip():
    c = QuantumCircuit(3, [g(U3, (0,), (0.1, 0.2, 0.3), 0), g("ccx", (2, 0, 1), (), 1), g(CZ, (1, 2), (), 2)])
    back = parse_circuit(c.to_qasm())
    assert back.n == 3 and back.gates == c.gates


def test_decompose_cx_and_ccx():
    c = QuantumCircuit(3, [g("cx", (0, 1))])
    assert [(x.kind, x.qubits) for x in decompose_to_native(c).gates] == [(H, (1,)), (CZ, (0, 1)), (H, (1,))]
    c = QuantumCircuit(3, [g("ccx", (0, 1, 2))])
    assert [(x.kind, x.qubits) for x in decompose_to_native(c).gates] == [(H, (2,)), (C2Z, (0, 1, 2)), (H, (2,))]


def test_decompose_native_is_identity():
    c = QuantumCircuit(3, [g(H, (0,), (), 0), g(CZ, (0, 1), (), 1), g(C2Z, (0, 1, 2), (), 2)])
    assert decompose_to_native(c).gates == c.gates


def test_commutes_matches_unitary_oracle():
    pairs = [
        (g(CZ, (0, 1)), g(CZ, (1, 2)), True),
        (g(H, (1,)), g(CZ, (0, 1)), False),
        (g(CZ, (0, 1)), g(C2Z, (1, 2, 3)), True),
        (g(U3, (1,), (0, 0.3, 0.4)), g(CZ, (0, 1)), True),
        (g(U3, (1,), (0.2, 0.3, 0.4)), g(CZ, (0, 1)), False),
    ]
    for a, b, expected in pairs:
        same = np.allclose(unitary(4, [a, b]), unitary(4, [b, a]))
        assert same == expected
        assert commutes(a, b) == expected


def test_dag_examples():
    dag = build_dag(QuantumCircuit(3, [g(CZ, (0, 1), (), 0), g(CZ, (1, 2), (), 1)]))
    assert dag.edges == set()
    dag = build_dag(QuantumCircuit(2, [g(H, (1,), (), 0), g(CZ, (0, 1), (), 1)]))
    assert dag.edges == {(0, 1)}
    dag = build_dag(QuantumCircuit(3, [g(CZ, (0, 1), (), 0), g(H, (1,), (), 1), g(CZ, (1, 2), (), 2)]))
    assert dag.edges == {(0, 1), (1, 2)}


def test_dag_diagonal_run_then_nondiagonal():
    # CZ(0,1), CZ(1,2) commute; a following H(1) must wait for both
    dag = build_dag(QuantumCircuit(3, [g(CZ, (0, 1), (), 0), g(CZ, (1, 2), (), 1), g(H, (1,), (), 2)]))
    assert dag.edges == {(0, 2), (1, 2)}


# random native circuits for the property tests
KINDS = [(H, 1), (U3, 1), (CZ, 2), (C2Z, 3), (C3Z, 4)]


@st.composite
def native_circuits(draw, max_n=5, max_gates=14):
    n = draw(st.integers(1, max_n))
    gates = []
    for i in range(draw(st.integers(0, max_gates))):
        kind, m = draw(st.sampled_from([k for k in KINDS if k[1] <= n]))
        qubits = draw(st.permutations(range(n)))[:m]
        if kind == U3:
            theta = draw(st.sampled_from([0.0, 0.7]))
            params = (theta, draw(st.floats(-3, 3)), draw(st.floats(-3, 3)))
        else:
            params = ()
        gates.append(GateNode(kind, tuple(qubits), params, i))
    return QuantumCircuit(n, gates)


def _random_topo_order(dag, rng):
    indeg = {k: len(v) for k, v in dag.preds.items()}
    ready = [k for k, v in indeg.items() if v == 0]
    out = []
    while ready:
        u = ready.pop(rng.randrange(len(ready)))
        out.append(u)
        for w in dag.succs[u]:
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    return out


@given(native_circuits(), st.randoms(use_true_random=False))
def test_any_topological_order_preserves_unitary(c, rng):
    dag = build_dag(c)
    order = _random_topo_order(dag, rng)
    assert sorted(order) == [x.id for x in c.gates]  # acyclic
    ref = unitary(c.n, c.gates)
    assert phase_distance(unitary(c.n, [dag.gates[i] for i in order]), ref) < 1e-9


@given(native_circuits())
def test_dag_edges_only_between_noncommuting_sharing_gates(c):
    dag = build_dag(c)
    sharing = sum(1 for a in c.gates for b in c.gates if a.id < b.id and set(a.qubits) & set(b.qubits))
    assert len(dag.edges) <= sharing
    for a, b in dag.edges:
        assert a < b
        assert not commutes(dag.gates[a], dag.gates[b])


@given(st.integers(2, 4), st.lists(st.tuples(st.sampled_from(["cx", "ccx", "cccx", "h"]),
                                             st.randoms(use_true_random=False)), max_size=8))
def test_decompose_preserves_unitary(n, spec):
    gates = []
    for i, (kind, rng) in enumerate(spec):
        m = {"cx": 2, "ccx": 3, "cccx": 4, "h": 1}[kind]
        if m > n:
            continue
        gates.append(GateNode(kind, tuple(rng.sample(range(n), m)), (), len(gates)))
    c = QuantumCircuit(n, gates)
    native = decompose_to_native(c)
    assert all(x.kind in (H, CZ, C2Z, C3Z) for x in native.gates)
    assert phase_distance(unitary(n, native.gates), unitary(n, c.gates)) < 1e-9
