"""ASAP scheduling under the restriction radius, and success-probability metrics."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

from .aod import AodOperation, MoveGroup, group_moves, lower_group, ACTIVATE, DEACTIVATE, SHIFT
from .circuit import CZ, H, SWAP, QuantumCircuit
from .hardware import Coordinate, HardwareSpec, within
from .mapper import MappingResult, PhysGate
from .mapping import FREE, MappingState

AOD = "aod"


@dataclass(frozen=True)
class ScheduledOp:
    kind: str  # native gate kind, or AOD for a lowered move group
    qubits: tuple[int, ...]  # physical qubits
    start: float
    duration: float
    params: tuple[float, ...] = ()
    carried: int = 0  # how many of ``qubits`` host a circuit qubit
    from_swap: bool = False
    sites: tuple[Coordinate, ...] = ()  # qubit sites while the op runs
    aod: tuple[AodOperation, ...] = ()

    @property
    def end(self) -> float:
        return self.start + self.duration


@dataclass
class ScheduledProgram:
    ops: list[ScheduledOp] = field(default_factory=list)
    T: float = 0.0

    def count(self, kind: str) -> int:
        return sum(1 for op in self.ops if op.kind == kind)

    @property
    def n_moves(self) -> int:
        return sum(len(op.qubits) for op in self.ops if op.kind == AOD)


def swap_sequence(a: int, b: int):
    """Native steps of SWAP(a, b): CX(a,b) CX(b,a) CX(a,b) with each CX as H-CZ-H
    and adjacent Hadamards on the same qubit cancelled."""
    return [(H, (b,)), (CZ, (a, b)), (H, (a,)), (H, (b,)), (CZ, (a, b)),
            (H, (a,)), (H, (b,)), (CZ, (a, b)), (H, (b,))]


class _Scheduler:
    def __init__(self, spec: HardwareSpec, state: MappingState):
        self.spec = spec
        self.pos = list(state.pos)
        self.p2c = list(state.p2c)
        self.avail: dict[int, float] = {}
        self.aod_free = 0.0
        self.ops: list[ScheduledOp] = []
        self._ends: list[tuple[float, int]] = []  # (end, op index) of multi-qubit gates

    def _restricted(self, sites, other) -> bool:
        r = self.spec.r_restr
        return any(within(p, q, r) for p in sites for q in other.sites)

    def gate(self, kind, qubits, params=(), carried=None, from_swap=False) -> ScheduledOp:
        dur = self.spec.gate_time(kind)
        t = max((self.avail.get(q, 0.0) for q in qubits), default=0.0)
        sites = tuple(self.pos[q] for q in qubits)
        if len(qubits) > 1:
            while True:
                i = bisect.bisect_right(self._ends, (t, math.inf))
                clash = [self.ops[j].end for _, j in self._ends[i:]
                         if self.ops[j].start < t + dur and self._restricted(sites, self.ops[j])]
                if not clash:
                    break
                t = max(clash)
        if carried is None:
            carried = sum(1 for q in qubits if self.p2c[q] != FREE)
        op = ScheduledOp(kind, tuple(qubits), t, dur, tuple(params), carried, from_swap, sites)
        self.ops.append(op)
        for q in qubits:
            self.avail[q] = op.end
        if len(qubits) > 1:
            bisect.insort(self._ends, (op.end, len(self.ops) - 1))
        return op

    def swap(self, a: int, b: int) -> None:
        for kind, qs in swap_sequence(a, b):
            carried = sum(1 for q in qs if self.p2c[q] != FREE)
            self.gate(kind, qs, (), carried, from_swap=True)
        self.p2c[a], self.p2c[b] = self.p2c[b], self.p2c[a]

    def group(self, group: MoveGroup) -> None:
        qubits = tuple(m.qubit for m in group.moves)
        t = max([self.aod_free, *(self.avail.get(q, 0.0) for q in qubits)])
        lowered = lower_group(group, self.spec, t)
        end = lowered.duration
        carried = sum(1 for q in qubits if self.p2c[q] != FREE)
        sites = tuple(self.pos[q] for q in qubits)
        self.ops.append(ScheduledOp(AOD, qubits, t, end - t, (), carried, False, sites, tuple(lowered.ops)))
        for m in group.moves:
            self.pos[m.qubit] = m.dst
            self.avail[m.qubit] = end
        self.aod_free = end


def schedule(items, state: MappingState, spec: HardwareSpec, window: int = 4) -> ScheduledProgram:
    """Schedule a routed stream (PhysGate / Move items, or already grouped)
    starting from the atom layout and qubit assignment in ``state``."""
    items = list(items)
    if any(not isinstance(it, (PhysGate, MoveGroup)) for it in items):
        items = group_moves(items, window)
    s = _Scheduler(spec, state)
    for it in items:
        if isinstance(it, MoveGroup):
            s.group(it)
        elif it.kind == SWAP:
            s.swap(*it.qubits)
        else:
            s.gate(it.kind, it.qubits, it.params)
    return ScheduledProgram(s.ops, max((op.end for op in s.ops), default=0.0))


def schedule_mapping(result: MappingResult, spec: HardwareSpec, window: int = 4) -> ScheduledProgram:
    return schedule(result.stream, result.initial, spec, window)


def schedule_original(circuit: QuantumCircuit, state: MappingState, spec: HardwareSpec) -> ScheduledProgram:
    """The circuit as written, on the initial layout, ignoring connectivity."""
    items = [PhysGate(g.kind, state.hosts(g), g.params, g.id) for g in circuit.gates]
    return schedule(items, state, spec)


# ---------------------------------------------------------------------------
# metrics


def log_success_probability(sched: ScheduledProgram, spec: HardwareSpec, n: int) -> tuple[float, float]:
    """(log P, t_idle) with P = exp(-t_idle / T_eff) * prod F_O."""
    busy = 0.0
    log_f = 0.0
    log_shuttle = math.log(spec.F_shuttle)
    for op in sched.ops:
        busy += op.duration * op.carried
        if op.kind == AOD:
            log_f += len(op.qubits) * log_shuttle
        else:
            log_f += math.log(spec.gate_fidelity(op.kind))
    t_idle = max(n * sched.T - busy, 0.0)
    return log_f - t_idle / spec.T_eff, t_idle


def success_probability(sched: ScheduledProgram, spec: HardwareSpec, n: int) -> tuple[float, float]:
    log_p, t_idle = log_success_probability(sched, spec, n)
    return math.exp(log_p), t_idle


@dataclass
class Metrics:
    T: float
    t_idle: float
    P: float
    delta_F: float
    delta_CZ: int
    delta_T: float
    runtime: float = 0.0
    log_P: float = 0.0
    T_original: float = 0.0
    P_original: float = 1.0
    cz_original: int = 0
    cz_mapped: int = 0
    swaps: int = 0
    moves: int = 0
    aod_groups: int = 0


def compare(original: ScheduledProgram, mapped: ScheduledProgram, spec: HardwareSpec, n: int,
            runtime: float = 0.0) -> Metrics:
    log_o, _ = log_success_probability(original, spec, n)
    log_m, idle = log_success_probability(mapped, spec, n)
    cz_o, cz_m = original.count(CZ), mapped.count(CZ)
    return Metrics(
        T=mapped.T, t_idle=idle, P=math.exp(log_m), delta_F=log_o - log_m,
        delta_CZ=cz_m - cz_o, delta_T=mapped.T - original.T, runtime=runtime, log_P=log_m,
        T_original=original.T, P_original=math.exp(log_o), cz_original=cz_o, cz_mapped=cz_m,
        swaps=sum(1 for op in mapped.ops if op.from_swap and op.kind == CZ) // 3,
        moves=mapped.n_moves, aod_groups=mapped.count(AOD),
    )


# ---------------------------------------------------------------------------
# text output


def _num(x: float) -> str:
    return f"{x:.6f}"


def _coords(vals) -> str:
    return "[" + ",".join(f"{v:.3f}" for v in vals) + "]"


def format_program(sched: ScheduledProgram) -> str:
    lines = []
    order = sorted(range(len(sched.ops)), key=lambda i: (sched.ops[i].start, i))
    for i in order:
        op = sched.ops[i]
        if op.kind != AOD:
            line = f"GATE {op.kind} q=[{','.join(map(str, op.qubits))}] t={_num(op.start)}"
            if op.params:
                line += " params=[" + ",".join(f"{p:.12g}" for p in op.params) + "]"
            lines.append(line)
            continue
        for a in op.aod:
            if a.kind == ACTIVATE:
                lines.append(f"AOD_ACT cols={_coords(a.cols)} rows={_coords(a.rows)} t={_num(a.start)}")
            elif a.kind == SHIFT:
                lines.append(f"AOD_SHIFT dx={a.dx:.3f} dy={a.dy:.3f} t={_num(a.start)} dur={_num(a.duration)}")
            elif a.kind == DEACTIVATE:
                lines.append(f"AOD_DEACT cols={_coords(a.cols)} rows={_coords(a.rows)} t={_num(a.start)}")
    return "\n".join(lines) + ("\n" if lines else "")


REPORT_FIELDS = ("delta_CZ", "delta_T", "delta_F", "T", "T_original", "t_idle", "P", "P_original",
                 "cz_original", "cz_mapped", "swaps", "moves", "aod_groups")


def _fmt(v) -> str:
    if isinstance(v, float):
        if math.isinf(v):
            return "inf"
        return f"{v:.10g}"
    return str(v)


def format_report(rows: list[tuple[dict, Metrics]], fmt: str = "kv", runtime: bool = False) -> str:
    """``rows`` pairs a context dict (circuit, mode, alpha, ...) with metrics.

    The runtime column is opt-in so that report files stay reproducible.
    """
    if fmt == "kv":
        blocks = []
        for ctx, m in rows:
            lines = [f"{k}={_fmt(v)}" for k, v in ctx.items()]
            lines += [f"{k}={_fmt(getattr(m, k))}" for k in REPORT_FIELDS]
            if runtime:
                lines.append(f"runtime={m.runtime:.3f}")
            blocks.append("\n".join(lines))
        return "\n\n".join(blocks) + "\n"
    if fmt != "table":
        raise ValueError(f"unknown report format {fmt!r}")
    marked = any("best" in ctx for ctx, _ in rows)
    head = ["circuit", "mode", "alpha", "dCZ", "dT[us]", "dF"] + (["RT[s]"] if runtime else [])
    head += ["best"] if marked else []
    body = []
    for ctx, m in rows:
        r = [str(ctx.get("circuit", "")), str(ctx.get("mode", "")), _fmt(ctx.get("alpha", "")),
             str(m.delta_CZ), f"{m.delta_T:.2f}", f"{m.delta_F:.5f}"]
        if runtime:
            r.append(f"{m.runtime:.2f}")
        if marked:
            r.append("*" if ctx.get("best") else "")
        body.append(r)
    widths = [max(len(x) for x in col) for col in zip(head, *body)]
    out = ["  ".join(x.ljust(w) for x, w in zip(line, widths)).rstrip() for line in [head, *body]]
    return "\n".join(out) + "\n"
