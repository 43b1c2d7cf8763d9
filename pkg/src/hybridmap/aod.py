"""Lowering of abstract moves to AOD activate/shift/deactivate sequences and
a replay validator for the row/column ordering and ghost-spot constraints.

A lowered group moves atoms that share one displacement. Atoms are loaded
row by row (one *phase* per source row). With more than one phase every
activation is followed by a diagonal offset of d/4, so each active line sits
off the lattice while other lines are loaded or moved; empty intersections
then never coincide with a trapped atom. Unloading reverses the offsets one
phase at a time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .hardware import HardwareSpec
from .shuttle_router import Move

ACTIVATE = "activate"
SHIFT = "shift"
DEACTIVATE = "deactivate"

OFFSET_FRACTION = 0.25
MAX_PHASES = 3  # phase 1 ends at offset 3d/4 with d/4 steps
ORDERING = "ordering"
GHOST = "ghost-spot"
LOAD = "load"
RELEASE = "release"


@dataclass(frozen=True)
class AodOperation:
    """Coordinates in µm; ``cols``/``rows`` are the lines acted on, given at
    their position before the operation."""

    kind: str
    cols: tuple[float, ...] = ()
    rows: tuple[float, ...] = ()
    dx: float = 0.0
    dy: float = 0.0
    start: float = 0.0
    duration: float = 0.0
    qubits: tuple[int, ...] = ()

    def shifted(self, t0: float) -> AodOperation:
        return AodOperation(self.kind, self.cols, self.rows, self.dx, self.dy,
                            self.start + t0, self.duration, self.qubits)


@dataclass
class AodSchedule:
    ops: list[AodOperation] = field(default_factory=list)
    moves: list[Move] = field(default_factory=list)

    @property
    def duration(self) -> float:
        return max((op.start + op.duration for op in self.ops), default=0.0)

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(sorted({m.qubit for m in self.moves}))


@dataclass
class MoveGroup:
    """Moves executed in one AOD session; all share a displacement."""

    moves: list[Move] = field(default_factory=list)

    @property
    def displacement(self) -> tuple[int, int]:
        return self.moves[0].displacement

    @property
    def rows(self) -> set[int]:
        return {m.src.y for m in self.moves}

    def accepts(self, m: Move) -> bool:
        if m.displacement != self.displacement:
            return False
        if len(self.rows | {m.src.y}) > MAX_PHASES:
            return False
        for o in self.moves:
            if o.qubit == m.qubit or o.dst == m.dst or o.src == m.src or o.dst == m.src:
                return False
        return True


def _conflicts(m: Move, item) -> bool:
    if isinstance(item, MoveGroup):
        sites = {m.src, m.dst}
        return any(o.qubit == m.qubit or o.src in sites or o.dst in sites for o in item.moves)
    return m.qubit in item.qubits


def group_moves(stream, window: int = 4) -> list:
    """Fold moves into earlier groups where parallel execution is safe.

    ``stream`` mixes moves with gate-like items exposing ``qubits``; the
    result keeps gates in place and replaces moves by :class:`MoveGroup`.
    A move may join one of the last ``window`` groups if it commutes with
    everything emitted after that group.
    """
    out: list = []
    groups: list[int] = []
    for item in stream:
        if not isinstance(item, Move):
            out.append(item)
            continue
        target = None
        recent = groups[-window:] if window > 0 else []
        oldest = recent[0] if recent else len(out)
        for j in range(len(out) - 1, oldest - 1, -1):
            cur = out[j]
            if isinstance(cur, MoveGroup) and cur.accepts(item):
                target = cur
                break
            if _conflicts(item, cur):
                break
        if target is None:
            out.append(MoveGroup([item]))
            groups.append(len(out) - 1)
        else:
            target.moves.append(item)
    return out


def lower_group(group: MoveGroup | list[Move], spec: HardwareSpec, start: float = 0.0) -> AodSchedule:
    """Native AOD operations for one group, starting at ``start``."""
    moves = group.moves if isinstance(group, MoveGroup) else list(group)
    if not moves:
        return AodSchedule()
    d, v = spec.d, spec.v
    disp = moves[0].displacement
    if any(m.displacement != disp for m in moves):
        raise ValueError("a group must share one displacement")
    by_row: dict[int, list[Move]] = {}
    for m in moves:
        by_row.setdefault(m.src.y, []).append(m)
    phases = [sorted(by_row[y], key=lambda m: m.src.x) for y in sorted(by_row)]
    if len(phases) > MAX_PHASES:
        raise ValueError(f"group needs {len(phases)} load phases (max {MAX_PHASES})")
    offset = OFFSET_FRACTION * d if len(phases) > 1 else 0.0

    ops: list[AodOperation] = []
    t = start
    lines_x: list[list[float]] = []  # current coordinates per phase
    lines_y: list[float] = []

    def shift(dx: float, dy: float):
        nonlocal t
        for ddx, ddy in ((dx, 0.0), (0.0, dy)):
            if ddx == 0 and ddy == 0:
                continue
            cols = tuple(sorted(x for xs in lines_x for x in xs))
            rows = tuple(sorted(lines_y))
            dur = (abs(ddx) + abs(ddy)) / v
            ops.append(AodOperation(SHIFT, cols, rows, ddx, ddy, t, dur,
                                    tuple(m.qubit for ph in loaded for m in ph)))
            for xs in lines_x:
                xs[:] = [x + ddx for x in xs]
            lines_y[:] = [y + ddy for y in lines_y]
            t += dur

    loaded: list[list[Move]] = []
    for ph in phases:
        cols = [m.src.x * d for m in ph]
        row = ph[0].src.y * d
        ops.append(AodOperation(ACTIVATE, tuple(cols), (row,), start=t, duration=spec.t_act,
                                qubits=tuple(m.qubit for m in ph)))
        t += spec.t_act
        lines_x.append(cols)
        lines_y.append(row)
        loaded.append(ph)
        if offset:
            shift(offset, offset)
    shift(disp[0] * d, disp[1] * d)
    while loaded:
        if offset:
            shift(-offset, -offset)
        ph = loaded.pop()
        cols = tuple(lines_x.pop())
        row = lines_y.pop()
        ops.append(AodOperation(DEACTIVATE, cols, (row,), start=t, duration=spec.t_deact,
                                qubits=tuple(m.qubit for m in ph)))
        t += spec.t_deact
    return AodSchedule(ops, list(moves))


def lower_moves(moves, spec: HardwareSpec, window: int = 4, start: float = 0.0) -> AodSchedule:
    """Lower a move list (or pre-built groups) into one serial AOD schedule."""
    items = list(moves)
    groups = items if items and isinstance(items[0], MoveGroup) else group_moves(items, window)
    sched = AodSchedule()
    t = start
    for g in groups:
        part = lower_group(g, spec, t)
        sched.ops.extend(part.ops)
        sched.moves.extend(part.moves)
        t = max(t, part.duration)
    return sched


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    kind: str
    time: float
    message: str


@dataclass
class ValidationResult:
    violation: Violation | None
    positions: dict[int, tuple[int, int]]

    @property
    def ok(self) -> bool:
        return self.violation is None


def _point_segment_distance(p, a, b) -> float:
    ax, ay = a
    bx, by = b
    px, py = p
    vx, vy = bx - ax, by - ay
    L = vx * vx + vy * vy
    s = 0.0 if L == 0 else max(0.0, min(1.0, ((px - ax) * vx + (py - ay) * vy) / L))
    return math.hypot(ax + s * vx - px, ay + s * vy - py)


def validate_schedule(sched: AodSchedule | list[AodOperation], positions: dict[int, tuple[int, int]],
                      spec: HardwareSpec) -> ValidationResult:
    """Replay ``sched`` over lattice ``positions`` (atom -> site) and report the
    first ORDERING / GHOST / LOAD / RELEASE violation."""
    ops = sched.ops if isinstance(sched, AodSchedule) else list(sched)
    d = spec.d
    tol = d / 10
    line_tol = 1e-9 * d
    static: dict[int, tuple[float, float]] = {q: (x * d, y * d) for q, (x, y) in positions.items()}
    cols: list[float] = []
    rows: list[float] = []
    loaded: dict[int, tuple[int, int]] = {}  # atom -> (col index, row index)

    def find(lines, value):
        for i, c in enumerate(lines):
            if abs(c - value) <= line_tol:
                return i
        return None

    def fail(kind, op, msg):
        return ValidationResult(Violation(kind, op.start, msg), _sites(static, d))

    def ghosts(col_from, row_from, col_to, row_to):
        holders = {(ci, ri) for ci, ri in loaded.values()}
        for ci in range(len(col_from)):
            for ri in range(len(row_from)):
                if (ci, ri) in holders:
                    continue
                a = (col_from[ci], row_from[ri])
                b = (col_to[ci], row_to[ri])
                for q, p in static.items():
                    if _point_segment_distance(p, a, b) <= tol:
                        return f"empty intersection ({b[0]:.3f},{b[1]:.3f}) passes atom {q}"
        return None

    for op in sorted(ops, key=lambda o: o.start):
        if op.kind == ACTIVATE:
            for vals, lines in ((op.cols, cols), (op.rows, rows)):
                for c in vals:
                    if any(abs(c - o) <= line_tol for o in lines):
                        return fail(ORDERING, op, f"line {c:.3f} coincides with an active line")
                    lines.append(c)
            for q in op.qubits:
                if q not in static:
                    return fail(LOAD, op, f"atom {q} is not trapped")
                ci, ri = find(cols, static[q][0]), find(rows, static[q][1])
                if ci is None or ri is None:
                    return fail(LOAD, op, f"atom {q} is not at an AOD intersection")
                loaded[q] = (ci, ri)
                del static[q]
            msg = ghosts(cols, rows, cols, rows)
            if msg:
                return fail(GHOST, op, msg)
        elif op.kind == SHIFT:
            new_cols, new_rows = list(cols), list(rows)
            for c in op.cols:
                i = find(cols, c)
                if i is None:
                    return fail(ORDERING, op, f"shift of inactive column {c:.3f}")
                new_cols[i] = cols[i] + op.dx
            for r in op.rows:
                i = find(rows, r)
                if i is None:
                    return fail(ORDERING, op, f"shift of inactive row {r:.3f}")
                new_rows[i] = rows[i] + op.dy
            for old, new, name in ((cols, new_cols, "column"), (rows, new_rows, "row")):
                for i in range(len(old)):
                    for j in range(i + 1, len(old)):
                        before = old[i] - old[j]
                        after = new[i] - new[j]
                        if before * after <= 0 or abs(after) <= line_tol:
                            return fail(ORDERING, op, f"{name}s {old[i]:.3f} and {old[j]:.3f} cross")
            msg = ghosts(cols, rows, new_cols, new_rows)
            if msg:
                return fail(GHOST, op, msg)
            cols[:], rows[:] = new_cols, new_rows
        elif op.kind == DEACTIVATE:
            drop_c = {find(cols, c) for c in op.cols}
            drop_r = {find(rows, r) for r in op.rows}
            if None in drop_c or None in drop_r:
                return fail(ORDERING, op, "deactivation of an inactive line")
            for q, (ci, ri) in list(loaded.items()):
                if ci in drop_c or ri in drop_r:
                    x, y = cols[ci], rows[ri]
                    sx, sy = round(x / d), round(y / d)
                    if abs(x - sx * d) > tol or abs(y - sy * d) > tol or not spec.in_bounds((sx, sy)):
                        return fail(RELEASE, op, f"atom {q} released off-site at ({x:.3f},{y:.3f})")
                    if any(abs(p[0] - sx * d) <= tol and abs(p[1] - sy * d) <= tol for p in static.values()):
                        return fail(RELEASE, op, f"atom {q} released onto an occupied site")
                    static[q] = (sx * d, sy * d)
                    del loaded[q]
            keep_c = [i for i in range(len(cols)) if i not in drop_c]
            keep_r = [i for i in range(len(rows)) if i not in drop_r]
            remap_c = {old: new for new, old in enumerate(keep_c)}
            remap_r = {old: new for new, old in enumerate(keep_r)}
            cols[:] = [cols[i] for i in keep_c]
            rows[:] = [rows[i] for i in keep_r]
            loaded = {q: (remap_c[ci], remap_r[ri]) for q, (ci, ri) in loaded.items()}
            msg = ghosts(cols, rows, cols, rows)
            if msg:
                return fail(GHOST, op, msg)
        else:
            return fail(ORDERING, op, f"unknown operation {op.kind!r}")
    if loaded:
        last = max(ops, key=lambda o: o.start)
        return fail(RELEASE, last, f"atoms {sorted(loaded)} still loaded at the end")
    return ValidationResult(None, _sites(static, d))


def _sites(static, d) -> dict[int, tuple[int, int]]:
    return {q: (round(x / d), round(y / d)) for q, (x, y) in static.items()}
