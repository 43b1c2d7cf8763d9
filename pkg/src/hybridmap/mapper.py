"""Hybrid mapping loop: layers -> capability split -> SWAP or shuttle routing."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

from .circuit import SWAP, QuantumCircuit, build_dag, decompose_to_native
from .decider import assign
from .gate_router import GateRouterParams, LastUsedTracker, route_along_path, route_gate_layer
from .hardware import HardwareSpec
from .layers import DEFAULT_LOOKAHEAD, LayerTracker
from .mapping import MappingState, initial_mapping
from .shuttle_router import Move, RoutingError, ShuttleParams, route_shuttle_layer

GATE_ONLY = "gate-only"
SHUTTLE_ONLY = "shuttle-only"
HYBRID = "hybrid"
MODES = (GATE_ONLY, SHUTTLE_ONLY, HYBRID)


@dataclass(frozen=True)
class PhysGate:
    """A gate on physical qubits. ``gate`` is the circuit gate id, or None for
    routing SWAPs."""

    kind: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()
    gate: int | None = None


@dataclass
class MapperConfig:
    mode: str = HYBRID
    alpha: float = 1.0
    lookahead: float = DEFAULT_LOOKAHEAD
    lambda_t: float = 0.0
    w_l: float = 0.1
    w_t: float = 0.1
    window: int = 4
    n_atoms: int | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.alpha < 0 or self.w_l < 0 or self.w_t < 0 or self.lambda_t < 0:
            raise ValueError("alpha and weights must be non-negative")
        if self.window < 0:
            raise ValueError("window must be non-negative")

    def weights(self) -> tuple[float, float]:
        """(alpha_g, alpha_s) for the decision rule."""
        if self.mode == GATE_ONLY:
            return 1.0, 0.0
        if self.mode == SHUTTLE_ONLY:
            return 0.0, 1.0
        if math.isinf(self.alpha):
            return 1.0, 0.0
        return self.alpha, 1.0


@dataclass
class MappingResult:
    circuit: QuantumCircuit  # native form of the input
    initial: MappingState
    final: MappingState
    stream: list = field(default_factory=list)  # PhysGate and Move items in order
    gate_routed: int = 0
    shuttle_routed: int = 0

    @property
    def n_swaps(self) -> int:
        return sum(1 for it in self.stream if isinstance(it, PhysGate) and it.kind == SWAP)

    @property
    def n_moves(self) -> int:
        return sum(1 for it in self.stream if isinstance(it, Move))


def map_circuit(circuit: QuantumCircuit, spec: HardwareSpec, config: MapperConfig | None = None,
                initial: MappingState | None = None) -> MappingResult:
    config = config or MapperConfig()
    native = decompose_to_native(circuit)
    dag = build_dag(native)
    state = initial.copy() if initial is not None else initial_mapping(spec, native, config.n_atoms)
    start = state.copy()
    tracker = LayerTracker(dag, config.lookahead)
    alpha_g, alpha_s = config.weights()
    g_params = GateRouterParams(config.lambda_t, config.w_l)
    s_params = ShuttleParams(config.w_l, config.w_t, config.window)
    last_used = LastUsedTracker()
    recent: deque[Move] = deque(maxlen=max(config.window, 1))
    forced: set[int] = set()
    result = MappingResult(native, start, state)
    stream = result.stream

    def execute(gid):
        g = dag.gates[gid]
        stream.append(PhysGate(g.kind, state.hosts(g), g.params, gid))
        tracker.commit(gid)

    while not tracker.done:
        ready = sorted(gid for gid in tracker.front if state.executable(dag.gates[gid]))
        if ready:
            for gid in ready:
                execute(gid)
            continue
        front = [dag.gates[i] for i in sorted(tracker.front)]
        look = [dag.gates[i] for i in sorted(tracker.lookahead)]
        split = assign(state, front, look, alpha_g, alpha_s, forced)
        if split.f_g:
            f_g = [dag.gates[i] for i in split.f_g]
            l_g = [dag.gates[i] for i in split.l_g]
            routed = route_gate_layer(state, f_g, l_g, last_used, g_params)
            swaps = routed.swaps
            if routed.aborted and config.mode == GATE_ONLY:
                # no shuttling allowed: walk one gate along a shortest path
                walk = next((w for g in f_g if (w := route_along_path(state, g)) is not None), None)
                if walk is None:
                    raise RoutingError("SWAP routing cannot make any front gate executable")
                swaps = swaps + walk
            elif routed.aborted:
                forced.update(split.f_g)
            for a, b in swaps:
                stream.append(PhysGate(SWAP, (a, b)))
            result.gate_routed += 1
            continue
        if config.mode == GATE_ONLY:
            raise RoutingError("gates " + ", ".join(map(str, split.f_s)) + " have no SWAP route")
        f_s = [dag.gates[i] for i in split.f_s]
        l_s = [dag.gates[i] for i in split.l_s]
        protected = {h for g in front for h in state.hosts(g)}
        routed = route_shuttle_layer(state, f_s, l_s, s_params, list(recent), protected)
        stream.extend(routed.moves)
        recent.extend(routed.moves)
        result.shuttle_routed += 1
    return result
