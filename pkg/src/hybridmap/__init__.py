"""Hybrid SWAP/shuttling circuit mapper for neutral-atom arrays."""

from .circuit import GateNode, QuantumCircuit, build_dag, decompose_to_native, parse_circuit
from .hardware import PRESETS, HardwareSpec, load_hardware
from .mapper import MapperConfig, MappingResult, map_circuit
from .mapping import MappingState, initial_mapping
from .scheduler import Metrics, compare, schedule, success_probability
from .cli import evaluate, sweep

__all__ = [
    "GateNode", "QuantumCircuit", "build_dag", "decompose_to_native", "parse_circuit",
    "PRESETS", "HardwareSpec", "load_hardware", "MapperConfig", "MappingResult", "map_circuit",
    "MappingState", "initial_mapping", "Metrics", "compare", "schedule", "success_probability",
    "evaluate", "sweep",
]
