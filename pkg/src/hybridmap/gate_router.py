"""SWAP-insertion routing with BFS positioning for multi-qubit gates."""

from __future__ import annotations

import math
from collections import deque
from itertools import permutations
from dataclasses import dataclass, field

import numpy as np

from .circuit import GateNode
from .mapping import MappingState

MAX_CLIQUES = 20


@dataclass(frozen=True)
class PositionCandidate:
    sites: tuple[int, ...]
    total_swaps: int
    slot_of: dict[int, int] = field(compare=False)  # circuit qubit -> physical slot


@dataclass
class LastUsedTracker:
    t: dict[int, int] = field(default_factory=dict)
    step: int = 0

    def touch(self, qubits) -> None:
        for q in qubits:
            self.t[q] = self.step

    def since(self, pair: tuple[int, int]) -> int:
        return min(self.step - self.t.get(q, 0) for q in pair)


@dataclass
class GateRouteResult:
    swaps: list[tuple[int, int]]
    executed: list[int]
    aborted: bool = False


def swap_candidates(state: MappingState, gates) -> list[tuple[int, int]]:
    """Edges incident to any physical qubit hosting a qubit of ``gates``."""
    out = set()
    for g in gates:
        for h in state.hosts(g):
            for o in state.adj[h]:
                out.add((h, o) if h < o else (o, h))
    return sorted(out)


def _cliques_through(state: MappingState, v: int, pool: set[int], size: int):
    """(size)-cliques in pool that are all adjacent to v, in sorted order."""
    cand = sorted(state.adj[v] & pool)

    def extend(chosen, rest):
        if len(chosen) == size:
            yield chosen
            return
        for i, u in enumerate(rest):
            nxt = [w for w in rest[i + 1:] if w in state.adj[u]]
            if len(nxt) + len(chosen) + 1 >= size:
                yield from extend(chosen + [u], nxt)

    yield from extend([], cand)


def _assign_slots(dist: np.ndarray, hosts: dict[int, int], sites) -> tuple[int, dict[int, int]]:
    # greedy nearest pairing of gate qubits to clique slots
    pairs = sorted((dist[h, s], q, s) for q, h in hosts.items() for s in sites)
    slot_of, used, total = {}, set(), 0
    for dd, q, s in pairs:
        if q in slot_of or s in used:
            continue
        slot_of[q] = s
        used.add(s)
        total += dd
    return total, slot_of


def position_candidates(state: MappingState, g: GateNode, k: int = MAX_CLIQUES) -> list[PositionCandidate]:
    """The first ``k`` cliques found by a multi-source BFS from the gate's
    hosts, scored by summed hop distance of gate qubits to slots, best first."""
    m = g.arity
    dist = state.distances()
    hosts = {q: state.c2p[q] for q in g.qubits}
    reach = dist[list(hosts.values())].min(axis=0)
    order = sorted((int(d), v) for v, d in enumerate(reach) if not math.isinf(d))
    visited: set[int] = set()
    found: list[tuple[int, ...]] = []
    for _, v in order:
        for rest in _cliques_through(state, v, visited, m - 1):
            found.append(tuple(sorted(rest + [v])))
            if len(found) >= k:
                break
        if len(found) >= k:
            break
        visited.add(v)
    out = []
    for sites in found:
        total, slot_of = _assign_slots(dist, hosts, sites)
        if any(math.isinf(dist[h, slot_of[q]]) for q, h in hosts.items()):
            continue
        out.append(PositionCandidate(sites, int(total), slot_of))
    out.sort(key=lambda p: (p.total_swaps, p.sites))
    return out


def find_position(state: MappingState, g: GateNode, k: int = MAX_CLIQUES) -> PositionCandidate | None:
    cands = position_candidates(state, g, k)
    return cands[0] if cands else None


def _moved(h: int, a: int, b: int) -> int:
    return b if h == a else a if h == b else h


def swap_delta(state: MappingState, pair: tuple[int, int], g: GateNode,
               position: PositionCandidate | None = None) -> float:
    """Change in the SWAP requirement of ``g`` (or of its position) under ``pair``."""
    a, b = pair
    dist = state.distances()
    if g.arity == 2:
        h0, h1 = state.hosts(g)
        if a not in (h0, h1) and b not in (h0, h1):
            return 0.0
        before = dist[h0, h1]
        if math.isinf(before):
            return 0.0  # a SWAP never joins components
        return float(dist[_moved(h0, a, b), _moved(h1, a, b)] - before)
    if position is None:
        return 0.0
    delta = 0.0
    for q, slot in position.slot_of.items():
        h = state.c2p[q]
        if h == a or h == b:
            delta += dist[_moved(h, a, b), slot] - dist[h, slot]
    return float(delta)


@dataclass
class GateRouterParams:
    lambda_t: float = 0.0
    w_l: float = 0.1


def gate_cost(state: MappingState, pair: tuple[int, int], front, lookahead,
              tracker: LastUsedTracker, params: GateRouterParams, positions=None) -> float:
    """exp(-lambda_t t(S)) [C_f(S) + w_l C_l(S)]; lower is better."""
    c_f, c_l = front_lookahead_delta(state, pair, front, lookahead, positions or {})
    return _combine(c_f, c_l, pair, tracker, params)


def _combine(c_f, c_l, pair, tracker, params) -> float:
    decay = math.exp(-params.lambda_t * tracker.since(pair)) if params.lambda_t else 1.0
    return decay * (c_f + params.w_l * c_l)


def front_lookahead_delta(state, pair, front, lookahead, positions) -> tuple[float, float]:
    c_f = sum(swap_delta(state, pair, g, positions.get(g.id)) for g in front)
    c_l = sum(swap_delta(state, pair, g, positions.get(g.id)) for g in lookahead)
    return c_f, c_l


def route_gate_layer(state: MappingState, front: list[GateNode], lookahead: list[GateNode],
                     tracker: LastUsedTracker, params: GateRouterParams,
                     patience: int | None = None) -> GateRouteResult:
    """Insert the cheapest SWAP until at least one ``front`` gate is executable.

    Gives up (``aborted``) after ``patience`` consecutive SWAPs that do not
    reach a new lowest front cost (so oscillation counts as no progress); the
    caller hands those gates to shuttling.
    """
    if patience is None:
        patience = max(50, 2 * state.spec.l)
    swaps: list[tuple[int, int]] = []
    positions = {g.id: p for g in [*front, *lookahead] if g.arity > 2
                 for p in [find_position(state, g)] if p is not None}
    stale = 0
    level = best_level = 0.0  # front cost relative to the start
    best_len = 0
    while True:
        ready = [g.id for g in front if state.executable(g)]
        if ready:
            return GateRouteResult(swaps, ready)
        if stale >= patience:
            # undo the fruitless tail so only useful SWAPs are emitted
            for a, b in reversed(swaps[best_len:]):
                state.apply_swap(a, b)
            return GateRouteResult(swaps[:best_len], [], aborted=True)
        targets = [g for g in front if g.arity == 2 or g.id in positions]
        cands = swap_candidates(state, targets)
        if not cands:
            stale = patience
            continue
        best, best_key = None, None
        for pair in cands:
            c_f, c_l = front_lookahead_delta(state, pair, targets, lookahead, positions)
            key = (_combine(c_f, c_l, pair, tracker, params), pair)
            if best_key is None or key < best_key:
                best, best_key, best_cf = pair, key, c_f
        a, b = best
        state.apply_swap(a, b)
        swaps.append(best)
        tracker.step += 1
        tracker.touch(state.vicinity(a, state.spec.r_restr) | state.vicinity(b, state.spec.r_restr) | {a, b})
        level += best_cf
        if level < best_level:
            best_level, best_len, stale = level, len(swaps), 0
        else:
            stale += 1


def _shortest_path(state: MappingState, src: int, dst: int, blocked: set[int]) -> list[int] | None:
    prev = {src: None}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        if u == dst:
            path = []
            while u is not None:
                path.append(u)
                u = prev[u]
            return path[::-1]
        for w in sorted(state.adj[u]):
            if w not in prev and w not in blocked:
                prev[w] = u
                queue.append(w)
    return None


def route_along_path(state: MappingState, g: GateNode) -> list[tuple[int, int]] | None:
    """Deterministic fallback when the greedy search stalls.

    A 2-qubit gate walks its first qubit along a shortest path to the second.
    Larger gates walk each qubit to its slot of a clique position, avoiding
    slots that are already filled. None if no candidate position works.
    """
    if g.arity == 2:
        cur, b = state.hosts(g)
        path = _shortest_path(state, cur, b, set())
        if path is None:
            return None
        steps = path[:-1]
    else:
        steps = None
    if steps is not None:
        swaps = []
        for u, w in zip(steps, steps[1:]):
            state.apply_swap(u, w)
            swaps.append((min(u, w), max(u, w)))
        return swaps
    for pos in position_candidates(state, g):
        dist = state.distances()
        base = sorted(pos.slot_of, key=lambda q: (dist[state.c2p[q], pos.slot_of[q]], q))
        for order in permutations(base):
            swaps = _walk_to_slots(state.copy(), order, pos.slot_of, g)
            if swaps is not None:
                for a, b in swaps:
                    state.apply_swap(a, b)
                return swaps
    return None


def _walk_to_slots(trial: MappingState, order, slot_of, g) -> list[tuple[int, int]] | None:
    swaps, placed = [], set()
    for q in order:
        path = _shortest_path(trial, trial.c2p[q], slot_of[q], placed)
        if path is None:
            return None
        for u, w in zip(path, path[1:]):
            trial.apply_swap(u, w)
            swaps.append((min(u, w), max(u, w)))
        placed.add(slot_of[q])
    return swaps if trial.executable(g) else None
