"""Command-line pipeline: parse -> map -> lower -> schedule -> metrics."""

from __future__ import annotations

import argparse
import logging
import math
import sys
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

from .benchmarks import BENCHMARKS
from .circuit import QasmError, QuantumCircuit, decompose_to_native, parse_circuit
from .hardware import PRESETS, HardwareSpec, load_hardware
from .mapper import HYBRID, MODES, MapperConfig, MappingResult, map_circuit
from .mapping import CapacityError, initial_mapping
from .scheduler import (Metrics, ScheduledProgram, compare, format_program, format_report,
                        schedule_mapping, schedule_original)
from .shuttle_router import RoutingError

log = logging.getLogger("hybridmap")

EXIT_OK, EXIT_PARSE, EXIT_CAPACITY, EXIT_ROUTING = 0, 2, 3, 4
DEFAULT_SWEEP = (0.9, 0.95, 1.0, 1.05, 1.1)


@dataclass
class RunConfig:
    circuit: str
    hardware: str = "mixed"
    mode: str = HYBRID
    alpha: float = 1.0
    lambda_t: float = 0.0
    w_l: float = 0.1
    w_t: float = 0.1
    window: int = 4
    lookahead: float = 5
    out: str | None = None
    report_format: str = "table"
    sweep: tuple[float, ...] = ()
    n_atoms: int | None = None

    def mapper_config(self, alpha: float | None = None) -> MapperConfig:
        return MapperConfig(mode=self.mode, alpha=self.alpha if alpha is None else alpha,
                            lookahead=self.lookahead, lambda_t=self.lambda_t, w_l=self.w_l,
                            w_t=self.w_t, window=self.window, n_atoms=self.n_atoms)


@dataclass
class Evaluation:
    metrics: Metrics
    program: ScheduledProgram
    mapping: MappingResult
    context: dict = field(default_factory=dict)


def load_circuit(source: str) -> QuantumCircuit:
    """A QASM file path, or the name of a bundled benchmark generator."""
    path = Path(source)
    if path.is_file():
        return parse_circuit(path.read_text(encoding="utf-8"))
    if source in BENCHMARKS:
        return BENCHMARKS[source]()
    raise FileNotFoundError(f"no circuit file or benchmark named {source!r}")


def evaluate(circuit: QuantumCircuit, spec: HardwareSpec, config: MapperConfig | None = None) -> Evaluation:
    config = config or MapperConfig()
    native = decompose_to_native(circuit)
    start = initial_mapping(spec, native, config.n_atoms)
    t0 = time.perf_counter()
    mapping = map_circuit(native, spec, config, initial=start)
    mapped = schedule_mapping(mapping, spec, config.window)
    runtime = time.perf_counter() - t0
    original = schedule_original(native, start, spec)
    metrics = compare(original, mapped, spec, native.n, runtime)
    return Evaluation(metrics, mapped, mapping)


def sweep(circuit: QuantumCircuit, spec: HardwareSpec, base: MapperConfig,
          alphas=DEFAULT_SWEEP) -> tuple[Evaluation, list[Evaluation]]:
    """Hybrid runs over ``alphas``; the best is the lowest delta_F (first on ties)."""
    runs = []
    for a in alphas:
        ev = evaluate(circuit, spec, replace(base, mode=HYBRID, alpha=a))
        ev.context["alpha"] = a
        runs.append(ev)
    best = min(runs, key=lambda e: e.metrics.delta_F)
    return best, runs


def run(config: RunConfig) -> int:
    try:
        circuit = load_circuit(config.circuit)
        spec = load_hardware(config.hardware)
    except (QasmError, ValueError, OSError) as exc:
        log.error("input error: %s", exc)
        return EXIT_PARSE
    base = config.mapper_config()
    name = Path(config.circuit).stem if Path(config.circuit).is_file() else config.circuit
    try:
        if config.sweep:
            best, runs = sweep(circuit, spec, base, config.sweep)
        else:
            best = evaluate(circuit, spec, base)
            best.context["alpha"] = config.alpha
            runs = [best]
    except CapacityError as exc:
        log.error("capacity: %s", exc)
        return EXIT_CAPACITY
    except RoutingError as exc:
        log.error("routing failed: %s", exc)
        return EXIT_ROUTING
    rows = []
    for ev in runs:
        hw = config.hardware if config.hardware in PRESETS else Path(config.hardware).name
        ctx = {"circuit": name, "hardware": hw,
               "mode": HYBRID if config.sweep else config.mode, "alpha": ev.context["alpha"]}
        if config.sweep:
            ctx["best"] = int(ev is best)
        rows.append((ctx, ev.metrics))
        log.info("mode=%s alpha=%s runtime=%.3fs", ctx["mode"], _alpha_str(ctx["alpha"]), ev.metrics.runtime)
    report = format_report(rows, config.report_format)
    program = format_program(best.program)
    if config.out:
        out = Path(config.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "program.txt").write_text(program, encoding="utf-8")
        (out / "report.txt").write_text(report, encoding="utf-8")
    sys.stdout.write(format_report(rows, config.report_format, runtime=True))
    return EXIT_OK


def _alpha_str(a: float) -> str:
    return "inf" if math.isinf(a) else f"{a:g}"


def _alpha(text: str) -> float:
    v = float(text)
    if v < 0 or math.isnan(v):
        raise argparse.ArgumentTypeError("alpha must be a non-negative number or 'inf'")
    return v


def _alphas(text: str) -> tuple[float, ...]:
    return tuple(_alpha(t) for t in text.split(",") if t.strip())


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hybridmap", description="Map a circuit onto a neutral-atom "
                                "array with SWAP insertion and atom shuttling.")
    p.add_argument("--circuit", required=True, help="QASM file or bundled benchmark name")
    p.add_argument("--hardware", default="mixed", help="preset (shuttling, gate, mixed) or config file")
    p.add_argument("--mode", choices=MODES, default=HYBRID)
    p.add_argument("--alpha", type=_alpha, default=1.0, help="alpha_g / alpha_s ratio; 'inf' = gates only")
    p.add_argument("--sweep", type=_alphas, nargs="?", const=DEFAULT_SWEEP, default=(),
                   help="comma-separated alphas; keep the lowest delta_F")
    p.add_argument("--lookahead", type=float, default=5)
    p.add_argument("--lambda-t", type=float, default=0.0)
    p.add_argument("--w-l", type=float, default=0.1)
    p.add_argument("--w-t", type=float, default=0.1)
    p.add_argument("--window", type=int, default=4)
    p.add_argument("--n-atoms", type=int, default=None, help="override the atom count")
    p.add_argument("--out", help="directory for program.txt and report.txt")
    p.add_argument("--report-format", choices=("table", "kv"), default="table")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    if args.sweep and args.mode != HYBRID:
        log.warning("--sweep implies hybrid mode; ignoring --mode %s", args.mode)
    cfg = RunConfig(circuit=args.circuit, hardware=args.hardware, mode=args.mode, alpha=args.alpha,
                    lambda_t=args.lambda_t, w_l=args.w_l, w_t=args.w_t, window=args.window,
                    lookahead=args.lookahead, out=args.out, report_format=args.report_format,
                    sweep=tuple(args.sweep or ()), n_atoms=args.n_atoms)
    try:
        cfg.mapper_config()
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_PARSE
    return run(cfg)

