"""Write the bundled benchmark circuits to benchmarks/*.qasm."""

import argparse
from pathlib import Path

from hybridmap.benchmarks import BENCHMARKS


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "benchmarks"))
    args = p.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, make in BENCHMARKS.items():
        c = make()
        (out / f"{name}.qasm").write_text(c.to_qasm(), encoding="utf-8")
        print(f"{name}: {c.n} qubits, {len(c.gates)} gates")


if __name__ == "__main__":
    main()
