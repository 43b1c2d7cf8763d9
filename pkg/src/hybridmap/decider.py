"""Per-gate choice between SWAP routing and shuttling, from estimated
success probabilities weighted by alpha_g and alpha_s."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .circuit import GateNode
from .gate_router import find_position
from .hardware import Coordinate, offsets_within, rect_distance, within
from .mapping import UNREACHABLE, MappingState


@dataclass
class CapabilityAssignment:
    f_g: list[int] = field(default_factory=list)
    l_g: list[int] = field(default_factory=list)
    f_s: list[int] = field(default_factory=list)
    l_s: list[int] = field(default_factory=list)
    alpha_g: float = 1.0
    alpha_s: float = 1.0


def estimate_gate_route(state: MappingState, g: GateNode) -> tuple[float, float]:
    """(SWAP count, time) to make ``g`` executable by SWAPs only."""
    if state.executable(g):
        return 0, 0.0
    if g.arity == 2:
        n = state.swap_distance(*state.hosts(g))
    else:
        pos = find_position(state, g)
        n = UNREACHABLE if pos is None else pos.total_swaps
    if math.isinf(n):
        return UNREACHABLE, UNREACHABLE
    return n, n * state.spec.swap_time


def _anchor(state: MappingState, hosts) -> int:
    def spread(a):
        pa = state.pos[a]
        return sum(math.dist(pa, state.pos[b]) for b in hosts if b != a)
    return min(hosts, key=lambda a: (spread(a), a))


def estimate_shuttle_route(state: MappingState, g: GateNode) -> tuple[int, float]:
    """(move count, time): one direct move per non-anchor qubit if the anchor's
    vicinity has room, otherwise a move-away plus a move."""
    spec = state.spec
    if state.executable(g):
        return 0, 0.0
    hosts = state.hosts(g)
    anchor = _anchor(state, hosts)
    at = state.pos[anchor]
    sites = list(_disc(state, at))
    free = [c for c in sites if state.is_free(c)]
    near = [c for c in sites if not state.is_free(c) and state.occupant(c) not in hosts]
    spare = None
    n_moves, t = 0, 0.0
    for q in hosts:
        if q == anchor or within(state.pos[q], at, spec.r_int):
            continue
        src = state.pos[q]
        if free:
            c = min(free, key=lambda c: rect_distance(src, c))
            free.remove(c)
            n_moves += 1
            t += spec.move_time(rect_distance(src, c) * spec.d)
            continue
        if spare is None:
            spare = state.free_sites()
        c = min(near, key=lambda c: rect_distance(src, c)) if near else at
        away = min(spare, key=lambda s: rect_distance(c, s))
        n_moves += 2
        t += spec.move_time(rect_distance(c, away) * spec.d)
        t += spec.move_time(rect_distance(src, c) * spec.d)
    return n_moves, t


def _disc(state: MappingState, at: Coordinate):
    # sites within r_int of ``at``, nearest first
    spec = state.spec
    for dx, dy in offsets_within(spec.r_int):
        c = Coordinate(at[0] + dx, at[1] + dy)
        if spec.in_bounds(c):
            yield c


def success_estimates(state: MappingState, g: GateNode) -> tuple[float, float, bool]:
    """(P_g, P_s, gate route reachable) from the local estimates."""
    spec = state.spec
    n_sw, t_g = estimate_gate_route(state, g)
    reachable = not math.isinf(n_sw)
    p_g = math.exp(-t_g / spec.T_eff) * spec.swap_fidelity ** n_sw if reachable else 0.0
    n_mv, t_s = estimate_shuttle_route(state, g)
    p_s = math.exp(-t_s / spec.T_eff) * spec.F_shuttle ** n_mv
    return p_g, p_s, reachable


def prefers_gate(state: MappingState, g: GateNode, alpha_g: float, alpha_s: float) -> bool:
    if state.executable(g):
        return True
    if alpha_s == 0:
        # P_s never enters; only reachability matters
        return not math.isinf(estimate_gate_route(state, g)[0])
    if alpha_g == 0:
        return False
    p_g, p_s, reachable = success_estimates(state, g)
    return reachable and alpha_g * p_g >= alpha_s * p_s


def assign(state: MappingState, front, lookahead, alpha_g: float = 1.0, alpha_s: float = 1.0,
           forced_shuttle=frozenset()) -> CapabilityAssignment:
    """Split multi-qubit front/lookahead gates between the two routers.

    ``forced_shuttle`` holds gate ids that SWAP routing already gave up on.
    """
    out = CapabilityAssignment(alpha_g=alpha_g, alpha_s=alpha_s)
    for gates, to_g, to_s in ((front, out.f_g, out.f_s), (lookahead, out.l_g, out.l_s)):
        for g in sorted(gates, key=lambda g: g.id):
            if g.arity < 2:
                continue
            if g.id not in forced_shuttle and prefers_gate(state, g, alpha_g, alpha_s):
                to_g.append(g.id)
            else:
                to_s.append(g.id)
    return out
