"""Compare gate-only, shuttle-only and alpha-swept hybrid mapping on the
bundled benchmarks for each hardware preset."""

import argparse
import math
import time
from dataclasses import replace

from hybridmap.benchmarks import BENCHMARKS
from hybridmap.cli import DEFAULT_SWEEP, evaluate, sweep
from hybridmap.hardware import PRESETS
from hybridmap.mapper import GATE_ONLY, SHUTTLE_ONLY, MapperConfig


def row(cells, widths):
    return "  ".join(str(c).ljust(w) for c, w in zip(cells, widths)).rstrip()


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--benchmarks", default=",".join(BENCHMARKS))
    p.add_argument("--hardware", default=",".join(PRESETS))
    p.add_argument("--alphas", default=",".join(map(str, DEFAULT_SWEEP)))
    args = p.parse_args()
    alphas = [float(a) for a in args.alphas.split(",")]
    head = ["hardware", "circuit", "mode", "alpha", "dCZ", "dT[us]", "dF", "RT[s]"]
    widths = [9, 9, 12, 5, 6, 10, 9, 6]
    print(row(head, widths))
    for hw in args.hardware.split(","):
        spec = PRESETS[hw]
        for name in args.benchmarks.split(","):
            c = BENCHMARKS[name]()
            base = MapperConfig()
            for mode in (GATE_ONLY, SHUTTLE_ONLY):
                t0 = time.perf_counter()
                m = evaluate(c, spec, replace(base, mode=mode)).metrics
                rt = time.perf_counter() - t0
                print(row([hw, name, mode, "-", m.delta_CZ, f"{m.delta_T:.1f}", f"{m.delta_F:.5f}", f"{rt:.2f}"], widths))
            t0 = time.perf_counter()
            best, _ = sweep(c, spec, base, alphas)
            rt = time.perf_counter() - t0
            m, a = best.metrics, best.context["alpha"]
            a = "inf" if math.isinf(a) else f"{a:g}"
            print(row([hw, name, "hybrid", a, m.delta_CZ, f"{m.delta_T:.1f}", f"{m.delta_F:.5f}", f"{rt:.2f}"], widths))


if __name__ == "__main__":
    main()
