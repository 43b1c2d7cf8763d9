"""Shuttling-based routing: move chains scored by distance progress and
AOD parallelism with recent moves."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

from .circuit import GateNode
from .hardware import Coordinate, HardwareSpec, offsets_within, rect_distance, within
from .mapping import FREE, MappingState

DIRECT = "direct"
MOVE_AWAY = "move-away"


class RoutingError(RuntimeError):
    """No move chain can make any shuttling-layer gate executable."""


@dataclass(frozen=True)
class Move:
    qubit: int
    src: Coordinate
    dst: Coordinate
    kind: str = DIRECT

    @property
    def displacement(self) -> tuple[int, int]:
        return self.dst[0] - self.src[0], self.dst[1] - self.src[1]

    def length(self, d: float) -> float:
        """Rectangular shuttling distance in µm."""
        return rect_distance(self.src, self.dst) * d

    def key(self):
        return (self.qubit, self.src, self.dst)


@dataclass(frozen=True)
class MoveChain:
    gate: int
    anchor: int
    moves: tuple[Move, ...]

    def __len__(self):
        return len(self.moves)


class _Overlay:
    """Copy-on-write view of atom positions used while drafting a chain."""

    def __init__(self, state: MappingState):
        self.state = state
        self.pos: dict[int, Coordinate] = {}
        self.occ: dict[Coordinate, int] = {}

    def where(self, q: int) -> Coordinate:
        return self.pos.get(q, self.state.pos[q])

    def occupant(self, c: Coordinate) -> int:
        return self.occ[c] if c in self.occ else self.state.occupant(c)

    def move(self, q: int, dst: Coordinate) -> Coordinate:
        src = self.where(q)
        self.occ[src] = FREE
        self.occ[dst] = q
        self.pos[q] = dst
        return src


def _sites_near(spec: HardwareSpec, center: Coordinate, radius: float):
    for dx, dy in offsets_within(radius):
        c = Coordinate(center[0] + dx, center[1] + dy)
        if spec.in_bounds(c):
            yield c


def _site_key(origin: Coordinate, c: Coordinate):
    return (rect_distance(origin, c), c.y, c.x)


def _away_target(spec: HardwareSpec, view: _Overlay, blocker_at: Coordinate,
                 anchor_at: Coordinate) -> Coordinate | None:
    # nearest free site outside the anchor's restriction disc; on small
    # lattices fall back to anything outside its interaction disc
    best = None
    for y in range(spec.l):
        for x in range(spec.l):
            c = Coordinate(x, y)
            if view.occupant(c) != FREE or within(c, anchor_at, spec.r_int):
                continue
            k = (within(c, anchor_at, spec.r_restr), *_site_key(blocker_at, c))
            if best is None or k < best[0]:
                best = (k, c)
    return None if best is None else best[1]


def _chain_for_anchor(state: MappingState, g: GateNode, anchor: int,
                      protected: frozenset[int]) -> MoveChain | None:
    spec = state.spec
    view = _Overlay(state)
    hosts = state.hosts(g)
    anchor_at = view.where(anchor)
    fixed = [anchor_at]
    others = [h for h in hosts if h != anchor]
    moves: list[Move] = []
    while others:
        best = None  # (level, distance, qubit, site)
        for q in others:
            at = view.where(q)
            if all(within(at, f, spec.r_int) for f in fixed):
                opt = (0, 0, q, at)
            else:
                sites = [c for c in _sites_near(spec, anchor_at, spec.r_int)
                         if c not in fixed and all(within(c, f, spec.r_int) for f in fixed)]
                free = [c for c in sites if view.occupant(c) == FREE]
                if free:
                    c = min(free, key=lambda c: _site_key(at, c))
                    opt = (1, rect_distance(at, c), q, c)
                else:
                    blocked = [c for c in sites if view.occupant(c) not in protected
                               and view.occupant(c) not in hosts]
                    if not blocked:
                        continue
                    c = min(blocked, key=lambda c: _site_key(at, c))
                    opt = (2, rect_distance(at, c), q, c)
            if best is None or opt < best:
                best = opt
        if best is None:
            return None
        level, _, q, site = best
        if level == 2:
            blocker = view.occupant(site)
            away = _away_target(spec, view, site, anchor_at)
            if away is None:
                return None
            view.move(blocker, away)
            moves.append(Move(blocker, site, away, MOVE_AWAY))
        if level >= 1:
            src = view.move(q, site)
            moves.append(Move(q, src, site, DIRECT))
        fixed.append(site)
        others.remove(q)
    return MoveChain(g.id, anchor, tuple(moves))


def build_chains(state: MappingState, g: GateNode, protected=frozenset()) -> list[MoveChain]:
    """One chain per anchor qubit, preferring direct moves; chains longer than
    the shortest one found are dropped.

    Atoms in ``protected`` are not moved away unless no chain exists without
    disturbing them; the gate's own atoms are never moved away.
    """
    own = frozenset(state.hosts(g))
    for guard in (frozenset(protected) | own, own):
        chains = [c for a in state.hosts(g)
                  if (c := _chain_for_anchor(state, g, a, guard)) is not None]
        if chains:
            shortest = min(len(c) for c in chains)
            return [c for c in chains if len(c) == shortest]
    return []


# ---------------------------------------------------------------------------
# parallelism with recent moves


def _share_loading(a: Move, b: Move) -> bool:
    return a.qubit != b.qubit and (a.src.y == b.src.y or a.src.x == b.src.x)


def delta_t(move: Move, other: Move, spec: HardwareSpec) -> float:
    """Extra time of ``move`` relative to one earlier move."""
    if _share_loading(move, other):
        if move.displacement == other.displacement and move.src != other.dst and move.dst != other.src:
            return 0.0
        return spec.t_act + spec.t_deact
    return spec.move_time(move.length(spec.d))


def delta_T_parallel(move: Move, recent, spec: HardwareSpec) -> float:
    """Best-case extra time of ``move`` given the recent move window."""
    if not recent:
        return spec.move_time(move.length(spec.d))
    return min(delta_t(move, m, spec) for m in recent)


def parallel_cost(move: Move, recent, spec: HardwareSpec) -> float:
    """Sum of pairwise extra times against the recent move window."""
    return sum(delta_t(move, m, spec) for m in recent)


# ---------------------------------------------------------------------------
# cost and routing


@dataclass
class ShuttleParams:
    w_l: float = 0.1
    w_t: float = 0.1
    window: int = 4


def _pair_sum(pos, hosts, d: float) -> float:
    total = 0.0
    for a, b in combinations(hosts, 2):
        pa, pb = pos(a), pos(b)
        total += math.hypot(pa[0] - pb[0], pa[1] - pb[1]) * d
    return total


def shuttle_cost(state: MappingState, chain: MoveChain, front, lookahead,
                 params: ShuttleParams, recent=()) -> float:
    """Sum over the chain's moves of C_f(M) + w_l C_l(M) + w_t C_parallel(M)."""
    spec = state.spec
    view = _Overlay(state)
    window = list(recent)[-params.window:] if params.window else []
    front_h = [state.hosts(g) for g in front]
    look_h = [state.hosts(g) for g in lookahead]
    total = 0.0
    for m in chain.moves:
        touched_f = [h for h in front_h if m.qubit in h]
        touched_l = [h for h in look_h if m.qubit in h]
        before_f = sum(_pair_sum(view.where, h, spec.d) for h in touched_f)
        before_l = sum(_pair_sum(view.where, h, spec.d) for h in touched_l)
        view.move(m.qubit, m.dst)
        c_f = sum(_pair_sum(view.where, h, spec.d) for h in touched_f) - before_f
        c_l = sum(_pair_sum(view.where, h, spec.d) for h in touched_l) - before_l
        c_t = parallel_cost(m, window, spec) if params.w_t else 0.0
        total += c_f + params.w_l * c_l + params.w_t * c_t
        if params.window:
            window = (window + [m])[-params.window:]
    return total


@dataclass
class ShuttleRouteResult:
    chain: MoveChain
    moves: list[Move]
    executed: list[int]


def route_shuttle_layer(state: MappingState, front: list[GateNode], lookahead: list[GateNode],
                        params: ShuttleParams, recent=(), protected=frozenset()) -> ShuttleRouteResult:
    """Apply the cheapest chain over all blocked ``front`` gates.

    Ties go to the shorter chain, then to the lexicographically smaller
    (gate id, moves) pair.
    """
    best = None
    for g in front:
        if state.executable(g):
            continue
        for chain in build_chains(state, g, protected):
            cost = shuttle_cost(state, chain, front, lookahead, params, recent)
            key = (cost, len(chain), g.id, tuple(m.key() for m in chain.moves))
            if best is None or key < best[0]:
                best = (key, chain)
    if best is None:
        raise RoutingError("no move chain exists for any shuttling gate: "
                           + ", ".join(str(g.id) for g in front))
    chain = best[1]
    for m in chain.moves:
        state.apply_move(m.qubit, m.dst)
    executed = [g.id for g in front if state.executable(g)]
    if chain.gate not in executed:
        raise RoutingError(f"chain for gate {chain.gate} did not make it executable")
    return ShuttleRouteResult(chain, list(chain.moves), executed)
