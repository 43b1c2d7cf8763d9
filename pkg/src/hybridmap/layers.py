"""Front and lookahead layers over the dependency DAG."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .circuit import DependencyDag, GateNode
from .mapping import MappingState

DEFAULT_LOOKAHEAD = 5


@dataclass(frozen=True)
class LayerSet:
    front: frozenset[int]
    lookahead: frozenset[int]
    lookahead_depth: float


def _lookahead(dag: DependencyDag, front, remaining: dict[int, int], depth: float) -> set[int]:
    # Kahn expansion from the front; a gate's level is its longest unexecuted
    # predecessor chain, known once all those predecessors have been levelled.
    if depth <= 0:
        return set()
    level = {g: 0 for g in front}
    pending: dict[int, int] = {}
    out = set()
    stack = list(front)
    while stack:
        u = stack.pop()
        lu = level[u]
        for w in dag.succs[u]:
            left = pending.get(w, remaining[w]) - 1
            pending[w] = left
            level[w] = max(level.get(w, 0), lu + 1)
            if left == 0 and level[w] <= depth:
                out.add(w)
                stack.append(w)
    return out


def compute_layers(dag: DependencyDag, executed: set[int], depth: float = DEFAULT_LOOKAHEAD) -> LayerSet:
    remaining = {g: sum(1 for p in dag.preds[g] if p not in executed)
                 for g in dag.gates if g not in executed}
    front = {g for g, k in remaining.items() if k == 0}
    return LayerSet(frozenset(front), frozenset(_lookahead(dag, front, remaining, depth)), depth)


class LayerTracker:
    """Incremental version of :func:`compute_layers` used by the mapper."""

    def __init__(self, dag: DependencyDag, depth: float = DEFAULT_LOOKAHEAD):
        self.dag = dag
        self.depth = math.inf if depth is None else depth
        self.executed: set[int] = set()
        self.order: list[int] = []
        self._remaining = {g: len(p) for g, p in dag.preds.items()}
        self.front: set[int] = {g for g, k in self._remaining.items() if k == 0}
        self._lookahead: frozenset[int] | None = None

    @property
    def done(self) -> bool:
        return not self.front

    @property
    def lookahead(self) -> frozenset[int]:
        if self._lookahead is None:
            self._lookahead = frozenset(_lookahead(self.dag, self.front, self._remaining, self.depth))
        return self._lookahead

    def layers(self) -> LayerSet:
        return LayerSet(frozenset(self.front), self.lookahead, self.depth)

    def commit(self, gid: int) -> None:
        if gid not in self.front:
            raise ValueError(f"gate {gid} is not in the front layer")
        self.front.remove(gid)
        self.executed.add(gid)
        self.order.append(gid)
        del self._remaining[gid]
        for w in self.dag.succs[gid]:
            self._remaining[w] -= 1
            if self._remaining[w] == 0:
                self.front.add(w)
        self._lookahead = None


def commit_executed(state: MappingState, layers: LayerTracker, g: GateNode) -> LayerTracker:
    if g.arity > 1 and not state.executable(g):
        raise ValueError(f"gate {g.id} is not executable in the current mapping")
    layers.commit(g.id)
    return layers
