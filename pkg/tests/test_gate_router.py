import math
import random

import pytest
from hypothesis import assume, given, strategies as st

from hybridmap.circuit import C2Z, CZ, GateNode
from hybridmap.gate_router import (GateRouterParams, LastUsedTracker, find_position, gate_cost,
                                   route_along_path, route_gate_layer, swap_candidates, swap_delta)
from conftest import make_spec, make_state
from oracles import swap_distance as bfs_swap_distance

NO_LOOK = GateRouterParams(lambda_t=0.0, w_l=0.0)


def line(n, **kw):
    spec = make_spec(l=max(n, 3), r_int=1.0, r_restr=1.0, **kw)
    return make_state(spec, [(x, 0) for x in range(n)])


def test_cost_single_gate_improvement():
    s = line(4)
    g = GateNode(CZ, (0, 3), (), 0)
    assert gate_cost(s, (0, 1), [g], [], LastUsedTracker(), NO_LOOK) == -1


def test_cost_with_lookahead_weight():
    s = line(4)
    front = [GateNode(CZ, (0, 3), (), 0)]
    look = [GateNode(CZ, (0, 2), (), 1)]
    c = gate_cost(s, (0, 1), front, look, LastUsedTracker(), GateRouterParams(0.0, 0.1))
    assert c == pytest.approx(-1.1)


def test_decay_scales_cost():
    s = line(4)
    g = GateNode(CZ, (0, 3), (), 0)
    tr = LastUsedTracker(step=3)
    c = gate_cost(s, (0, 1), [g], [], tr, GateRouterParams(lambda_t=0.5, w_l=0.0))
    assert c == pytest.approx(-math.exp(-1.5))


def test_executable_gate_needs_no_swaps():
    s = line(3)
    res = route_gate_layer(s, [GateNode(CZ, (0, 1), (), 0)], [], LastUsedTracker(), NO_LOOK)
    assert res.swaps == [] and res.executed == [0]


def test_corner_to_corner_three_swaps():
    spec = make_spec(l=3, r_int=1.0, r_restr=1.0)
    s = make_state(spec, [(x, y) for y in range(3) for x in range(3)])
    oracle = bfs_swap_distance(s.pos, 1.0, 0, 8)
    res = route_gate_layer(s, [GateNode(CZ, (0, 8), (), 0)], [], LastUsedTracker(), NO_LOOK)
    assert len(res.swaps) == oracle == 3 and res.executed == [0]


def test_shared_swap_executes_both_front_gates():
    s = line(4)
    front = [GateNode(CZ, (0, 2), (), 0), GateNode(CZ, (1, 3), (), 1)]
    # exhaustive search over single SWAPs: which make both gates executable
    both = []
    for a, b in sorted(s.edges()):
        t = s.copy()
        t.apply_swap(a, b)
        if all(t.executable(g) for g in front):
            both.append((a, b))
    assert both == [(1, 2)]
    res = route_gate_layer(s, front, [], LastUsedTracker(), NO_LOOK)
    assert res.swaps == both and res.executed == [0, 1]


def test_position_delta_counts_slot_distance():
    spec = make_spec(l=5, r_int=1.5, r_restr=1.5)
    s = make_state(spec, [(0, 0), (4, 0), (0, 4)] + [(2, 2), (2, 1), (1, 1), (3, 1), (1, 3)], n=3)
    g = GateNode(C2Z, (0, 1, 2), (), 0)
    pos = find_position(s, g)
    assert pos is not None
    dist = s.distances()
    for pair in swap_candidates(s, [g]):
        t = s.copy()
        t.apply_swap(*pair)
        before = sum(dist[s.c2p[q], slot] for q, slot in pos.slot_of.items())
        after = sum(t.distances()[t.c2p[q], slot] for q, slot in pos.slot_of.items())
        assert swap_delta(s, pair, g, pos) == pytest.approx(after - before)


@st.composite
def layouts(draw, l=6, lo=8, hi=36):
    sites = draw(st.permutations([(x, y) for y in range(l) for x in range(l)]))
    return sites[:draw(st.integers(lo, hi))]


def _connected(s, a, b):
    return not math.isinf(bfs_swap_distance(s.pos, s.spec.r_int, a, b))


@given(layouts(), st.sampled_from([1.0, 1.5, 2.0]))
def test_swaps_adjacent_and_optimal_for_single_gate(pos, r):
    spec = make_spec(l=6, r_int=r, r_restr=r)
    s = make_state(spec, pos, n=2)
    assume(_connected(s, 0, 1))
    replay = s.copy()
    res = route_gate_layer(s, [GateNode(CZ, (0, 1), (), 0)], [], LastUsedTracker(), NO_LOOK)
    for a, b in res.swaps:
        assert b in replay.adj[a]
        replay.apply_swap(a, b)
    assert len(res.swaps) == bfs_swap_distance(pos, r, 0, 1)
    assert res.executed == [0] and replay.c2p == s.c2p


@given(layouts(lo=10), st.integers(0, 3))
def test_layer_routing_uses_adjacent_swaps(pos, shift):
    spec = make_spec(l=6, r_int=1.5, r_restr=1.5)
    s = make_state(spec, pos, n=6)
    front = [GateNode(CZ, (0, 1), (), 0), GateNode(C2Z, (2, 3, 4), (), 1)]
    look = [GateNode(CZ, (5, shift), (), 2)]
    replay = s.copy()
    res = route_gate_layer(s, front, look, LastUsedTracker(), GateRouterParams(0.0, 0.1))
    for a, b in res.swaps:
        assert b in replay.adj[a]
        replay.apply_swap(a, b)
    assert replay.c2p == s.c2p
    assert res.aborted or res.executed
    assert all(s.executable(front[i]) for i in res.executed)


@given(layouts(), st.floats(0.01, 1000))
def test_argmin_invariant_under_scaling(pos, k):
    spec = make_spec(l=6, r_int=1.5, r_restr=1.5)
    s = make_state(spec, pos, n=4)
    front = [GateNode(CZ, (0, 1), (), 0)]
    look = [GateNode(CZ, (2, 3), (), 1)]
    cands = swap_candidates(s, front)
    assume(cands)
    costs = {p: gate_cost(s, p, front, look, LastUsedTracker(), GateRouterParams(0.0, 0.1)) for p in cands}
    assert min(cands, key=lambda p: (costs[p], p)) == min(cands, key=lambda p: (k * costs[p], p))


def test_path_fallback_reaches_clique():
    spec = make_spec(l=4, r_int=1.5, r_restr=1.5)
    sites = [(x, y) for y in range(4) for x in range(4)]
    s = make_state(spec, [(0, 0), (3, 3), (0, 3)] + [c for c in sites if c not in ((0, 0), (3, 3), (0, 3))], n=3)
    g = GateNode(C2Z, (0, 1, 2), (), 0)
    replay = s.copy()
    swaps = route_along_path(s, g)
    assert swaps is not None and s.executable(g)
    for a, b in swaps:
        assert b in replay.adj[a]
        replay.apply_swap(a, b)


def test_acceptance_instances_match_oracle():
    rng = random.Random(7)
    spec = make_spec(l=6, r_int=1.0, r_restr=1.0)
    checked = 0
    while checked < 100:
        sites = [(x, y) for y in range(6) for x in range(6)]
        rng.shuffle(sites)
        pos = sites[:rng.randint(12, 36)]
        oracle = bfs_swap_distance(pos, 1.0, 0, 1)
        if oracle == 0 or math.isinf(oracle):
            continue
        s = make_state(spec, pos, n=2)
        res = route_gate_layer(s, [GateNode(CZ, (0, 1), (), 0)], [], LastUsedTracker(), NO_LOOK)
        assert len(res.swaps) == oracle
        checked += 1
