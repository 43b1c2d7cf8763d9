"""Circuit IR: a QASM-2 subset parser, C_mX -> C_mZ decomposition and a
commutation-aware dependency DAG."""

from __future__ import annotations

import ast
import math
import operator
import re
from dataclasses import dataclass, field

# gate kinds
U3 = "u3"
H = "h"
CZ = "cz"
C2Z = "ccz"
C3Z = "cccz"
SWAP = "swap"
CX = "cx"
C2X = "ccx"
C3X = "cccx"

NATIVE_KINDS = frozenset({U3, H, CZ, C2Z, C3Z})
CZ_FAMILY = frozenset({CZ, C2Z, C3Z})
ARITY = {U3: 1, H: 1, CZ: 2, C2Z: 3, C3Z: 4, SWAP: 2, CX: 2, C2X: 3, C3X: 4}
_X_TO_Z = {CX: CZ, C2X: C2Z, C3X: C3Z}

DIAGONAL_TOL = 1e-9


class QasmError(ValueError):
    """Syntax or semantic error in a circuit listing."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class GateNode:
    kind: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()
    id: int = 0

    def __post_init__(self):
        if self.kind not in ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(self.qubits) != ARITY[self.kind]:
            raise ValueError(f"{self.kind} expects {ARITY[self.kind]} qubits, got {len(self.qubits)}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"duplicate qubit in {self.kind}{self.qubits}")
        if self.kind == U3 and len(self.params) != 3:
            raise ValueError("u3 takes three angles")

    @property
    def arity(self) -> int:
        return len(self.qubits)

    @property
    def is_diagonal(self) -> bool:
        """Diagonal in the computational basis (CZ family, or U3 with theta = 0)."""
        if self.kind in CZ_FAMILY:
            return True
        return self.kind == U3 and abs(self.params[0]) <= DIAGONAL_TOL


@dataclass
class QuantumCircuit:
    n: int
    gates: list[GateNode] = field(default_factory=list)

    def __post_init__(self):
        for g in self.gates:
            for q in g.qubits:
                if not 0 <= q < self.n:
                    raise ValueError(f"qubit {q} out of range for {self.n}-qubit circuit")

    def count(self, kind: str) -> int:
        return sum(1 for g in self.gates if g.kind == kind)

    def to_qasm(self) -> str:
        lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{self.n}];"]
        for g in self.gates:
            args = ",".join(f"q[{q}]" for q in g.qubits)
            if g.params:
                angles = ",".join(repr(float(p)) for p in g.params)
                lines.append(f"{g.kind}({angles}) {args};")
            else:
                lines.append(f"{g.kind} {args};")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# parsing

_GATE_NAMES = {"u3": U3, "u": U3, "h": H, "cx": CX, "cz": CZ, "ccx": C2X,
               "ccz": C2Z, "cccx": C3X, "cccz": C3Z}
_IGNORED = ("openqasm", "include", "creg", "barrier")
_STMT = re.compile(r"^(?P<name>[A-Za-z_]\w*)\s*(?:\((?P<params>[^)]*)\))?\s*(?P<args>.*)$")
_ARG = re.compile(r"^(?P<reg>[A-Za-z_]\w*)\s*\[\s*(?P<idx>\d+)\s*\]$")
_QREG = re.compile(r"^qreg\s+(?P<reg>[A-Za-z_]\w*)\s*\[\s*(?P<size>\d+)\s*\]$")

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}


def _eval_angle(expr: str, line: int) -> float:
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise QasmError(f"bad angle expression {expr!r}", line)

    try:
        return ev(ast.parse(expr.strip(), mode="eval"))
    except SyntaxError:
        raise QasmError(f"bad angle expression {expr!r}", line) from None


def _statements(text: str):
    """Yield (statement, line number of its first character)."""
    buf, start = [], None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("//", 1)[0]
        for ch in line:
            if ch == ";":
                stmt = "".join(buf).strip()
                if stmt:
                    yield stmt, start
                buf, start = [], None
            else:
                if start is None and not ch.isspace():
                    start = lineno
                buf.append(ch)
        buf.append(" ")
    rest = "".join(buf).strip()
    if rest:
        raise QasmError("missing ';'", start)


def parse_circuit(text: str) -> QuantumCircuit:
    """Parse a QASM-2 listing restricted to u3/u/h/cx/cz/ccx/ccz/cccx/cccz."""
    regs: dict[str, tuple[int, int]] = {}
    n = 0
    gates: list[GateNode] = []
    for stmt, line in _statements(text):
        low = stmt.lower()
        if low.startswith(_IGNORED):
            continue
        m = _QREG.match(stmt)
        if m:
            reg, size = m["reg"], int(m["size"])
            if reg in regs:
                raise QasmError(f"register {reg!r} redeclared", line)
            regs[reg] = (n, size)
            n += size
            continue
        m = _STMT.match(stmt)
        if not m:
            raise QasmError(f"cannot parse {stmt!r}", line)
        name = m["name"].lower()
        if name not in _GATE_NAMES:
            raise QasmError(f"unsupported gate {m['name']!r}", line)
        kind = _GATE_NAMES[name]
        params: tuple[float, ...] = ()
        if m["params"] is not None:
            params = tuple(_eval_angle(p, line) for p in m["params"].split(","))
        if (kind == U3) != bool(params):
            raise QasmError(f"{name} has wrong parameters", line)
        if kind == U3 and len(params) != 3:
            raise QasmError(f"{name} takes three angles", line)
        qubits = []
        for arg in filter(None, (a.strip() for a in m["args"].split(","))):
            am = _ARG.match(arg)
            if not am:
                raise QasmError(f"bad qubit argument {arg!r}", line)
            if am["reg"] not in regs:
                raise QasmError(f"undeclared register {am['reg']!r}", line)
            offset, size = regs[am["reg"]]
            idx = int(am["idx"])
            if idx >= size:
                raise QasmError(f"qubit index {idx} out of range for {am['reg']}[{size}]", line)
            qubits.append(offset + idx)
        try:
            gates.append(GateNode(kind, tuple(qubits), params, id=len(gates)))
        except ValueError as exc:
            raise QasmError(str(exc), line) from None
    return QuantumCircuit(n, gates)


def decompose_to_native(c: QuantumCircuit) -> QuantumCircuit:
    """Rewrite every C_mX(controls, t) as H(t) C_mZ(controls + t) H(t)."""
    out: list[GateNode] = []

    def emit(kind, qubits, params=()):
        out.append(GateNode(kind, tuple(qubits), params, id=len(out)))

    for g in c.gates:
        if g.kind in _X_TO_Z:
            t = g.qubits[-1]
            emit(H, (t,))
            emit(_X_TO_Z[g.kind], g.qubits)
            emit(H, (t,))
        elif g.kind in NATIVE_KINDS:
            emit(g.kind, g.qubits, g.params)
        else:
            raise ValueError(f"cannot decompose {g.kind}")
    return QuantumCircuit(c.n, out)


def commutes(a: GateNode, b: GateNode) -> bool:
    if not set(a.qubits) & set(b.qubits):
        return True
    return a.is_diagonal and b.is_diagonal


# ---------------------------------------------------------------------------
# dependency DAG


@dataclass
class DependencyDag:
    gates: dict[int, GateNode]
    preds: dict[int, set[int]]
    succs: dict[int, set[int]]

    @property
    def nodes(self) -> list[int]:
        return list(self.gates)

    @property
    def edges(self) -> set[tuple[int, int]]:
        return {(a, b) for a, bs in self.succs.items() for b in bs}


def build_dag(c: QuantumCircuit) -> DependencyDag:
    """Precedence edges between non-commuting gates on a shared qubit.

    Per qubit we keep the last non-diagonal gate and the run of diagonal
    gates after it; edges implied by transitivity are not materialised.
    """
    gates = {g.id: g for g in c.gates}
    preds: dict[int, set[int]] = {g.id: set() for g in c.gates}
    succs: dict[int, set[int]] = {g.id: set() for g in c.gates}
    last_nondiag: dict[int, int] = {}
    diag_run: dict[int, list[int]] = {}

    def link(a, b):
        preds[b].add(a)
        succs[a].add(b)

    for g in c.gates:
        for q in g.qubits:
            run = diag_run.setdefault(q, [])
            if g.is_diagonal:
                if q in last_nondiag:
                    link(last_nondiag[q], g.id)
                run.append(g.id)
            else:
                if run:
                    for a in run:
                        link(a, g.id)
                elif q in last_nondiag:
                    link(last_nondiag[q], g.id)
                last_nondiag[q] = g.id
                diag_run[q] = []
    return DependencyDag(gates, preds, succs)
