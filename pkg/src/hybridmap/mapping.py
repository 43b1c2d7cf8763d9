"""Double mapping: circuit qubit -> physical qubit (f_q) and physical qubit
-> lattice coordinate (f_a), plus the derived connectivity graph."""

from __future__ import annotations

import copy
import math
from collections import deque
from itertools import combinations

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .circuit import GateNode, QuantumCircuit
from .hardware import Coordinate, HardwareSpec, offsets_within, within

UNREACHABLE = math.inf
FREE = -1


class CapacityError(ValueError):
    """The lattice cannot hold the requested register."""


class MappingState:
    """Mutable mapping state; the connectivity graph is kept incrementally."""

    def __init__(self, spec: HardwareSpec, n: int, positions: list[tuple[int, int]]):
        self.spec = spec
        self.n = n
        self.N = len(positions)
        if self.N < n:
            raise CapacityError(f"{n} circuit qubits need at least {n} atoms")
        self.pos: list[Coordinate] = [Coordinate(*p) for p in positions]
        self.grid = [[FREE] * spec.l for _ in range(spec.l)]
        for q, (x, y) in enumerate(self.pos):
            if not spec.in_bounds((x, y)):
                raise ValueError(f"atom {q} placed out of bounds at {(x, y)}")
            if self.grid[y][x] != FREE:
                raise ValueError(f"two atoms placed at {(x, y)}")
            self.grid[y][x] = q
        self.c2p = list(range(n))
        self.p2c = [i if i < n else FREE for i in range(self.N)]
        self.adj: list[set[int]] = [self._neighbours(q) for q in range(self.N)]
        self._dist: np.ndarray | None = None

    # -- geometry ----------------------------------------------------------

    def occupant(self, c: tuple[int, int]) -> int:
        return self.grid[c[1]][c[0]]

    def is_free(self, c: tuple[int, int]) -> bool:
        return self.grid[c[1]][c[0]] == FREE

    def _sites_around(self, center: tuple[int, int], radius: float):
        cx, cy = center
        l = self.spec.l
        for dx, dy in offsets_within(radius):
            x, y = cx + dx, cy + dy
            if 0 <= x < l and 0 <= y < l:
                yield x, y

    def _neighbours(self, q: int) -> set[int]:
        out = set()
        for x, y in self._sites_around(self.pos[q], self.spec.r_int):
            o = self.grid[y][x]
            if o != FREE:
                out.add(o)
        return out

    def vicinity(self, q: int, radius: float) -> set[int]:
        if not 0 <= q < self.N:
            raise KeyError(f"unknown physical qubit {q}")
        out = set()
        for x, y in self._sites_around(self.pos[q], radius):
            o = self.grid[y][x]
            if o != FREE:
                out.add(o)
        return out

    def free_sites_within(self, center: tuple[int, int], radius: float) -> set[Coordinate]:
        out = {Coordinate(x, y) for x, y in self._sites_around(center, radius)
               if self.grid[y][x] == FREE}
        if self.is_free(center):
            out.add(Coordinate(*center))
        return out

    def free_sites(self) -> list[Coordinate]:
        l = self.spec.l
        return [Coordinate(x, y) for y in range(l) for x in range(l) if self.grid[y][x] == FREE]

    # -- connectivity ------------------------------------------------------

    def edges(self) -> set[tuple[int, int]]:
        return {(a, b) for a in range(self.N) for b in self.adj[a] if a < b}

    def full_recompute(self) -> list[set[int]]:
        """Connectivity by brute force over all pairs (consistency check)."""
        adj = [set() for _ in range(self.N)]
        for a, b in combinations(range(self.N), 2):
            if within(self.pos[a], self.pos[b], self.spec.r_int):
                adj[a].add(b)
                adj[b].add(a)
        return adj

    def distances(self) -> np.ndarray:
        """All-pairs hop counts in the connectivity graph (inf if disconnected)."""
        if self._dist is None:
            rows, cols = [], []
            for a, nbrs in enumerate(self.adj):
                rows.extend([a] * len(nbrs))
                cols.extend(nbrs)
            g = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(self.N, self.N))
            self._dist = shortest_path(g, directed=False, unweighted=True)
        return self._dist

    def hops(self, a: int, b: int) -> float:
        return float(self.distances()[a, b])

    def swap_distance(self, a: int, b: int) -> float:
        """SWAPs needed before a and b interact; UNREACHABLE if disconnected."""
        h = self.hops(a, b)
        return UNREACHABLE if math.isinf(h) else int(h) - 1

    def bfs_hops(self, source: int) -> dict[int, int]:
        seen = {source: 0}
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for w in self.adj[u]:
                if w not in seen:
                    seen[w] = seen[u] + 1
                    queue.append(w)
        return seen

    # -- mutations ---------------------------------------------------------

    def apply_swap(self, a: int, b: int) -> None:
        if b not in self.adj[a]:
            raise ValueError(f"SWAP({a},{b}) on non-adjacent qubits")
        ca, cb = self.p2c[a], self.p2c[b]
        self.p2c[a], self.p2c[b] = cb, ca
        if ca != FREE:
            self.c2p[ca] = b
        if cb != FREE:
            self.c2p[cb] = a

    def apply_move(self, q: int, target: tuple[int, int]) -> None:
        if not self.spec.in_bounds(target):
            raise ValueError(f"move target {target} out of bounds")
        if not self.is_free(target):
            raise ValueError(f"move target {target} occupied by atom {self.occupant(target)}")
        x, y = self.pos[q]
        self.grid[y][x] = FREE
        self.pos[q] = Coordinate(*target)
        self.grid[target[1]][target[0]] = q
        for o in self.adj[q]:
            self.adj[o].discard(q)
        self.adj[q] = self._neighbours(q)
        for o in self.adj[q]:
            self.adj[o].add(q)
        self._dist = None

    # -- queries -----------------------------------------------------------

    def hosts(self, g: GateNode) -> tuple[int, ...]:
        return tuple(self.c2p[q] for q in g.qubits)

    def executable(self, g: GateNode) -> bool:
        """All pairs of the gate's physical qubits lie within r_int."""
        hs = self.hosts(g)
        return all(b in self.adj[a] for a, b in combinations(hs, 2))

    def copy(self) -> MappingState:
        new = copy.copy(self)
        new.pos = list(self.pos)
        new.grid = [row[:] for row in self.grid]
        new.c2p = list(self.c2p)
        new.p2c = list(self.p2c)
        new.adj = [set(s) for s in self.adj]
        return new


def initial_mapping(spec: HardwareSpec, circuit: QuantumCircuit | int,
                    n_atoms: int | None = None) -> MappingState:
    """Trivial identity layout q_i -> Q_i -> C_i, sites enumerated row-major."""
    n = circuit if isinstance(circuit, int) else circuit.n
    N = n_atoms if n_atoms is not None else (spec.n_atoms if spec.n_atoms is not None else n)
    N = max(N, n)
    if N >= spec.n_sites:
        raise CapacityError(f"{N} atoms leave no free site on a {spec.l}x{spec.l} lattice")
    return MappingState(spec, n, [spec.site(i) for i in range(N)])
