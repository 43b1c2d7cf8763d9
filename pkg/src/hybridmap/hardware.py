"""Lattice geometry and hardware parameters of a neutral-atom device."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from functools import lru_cache
from pathlib import Path
from typing import NamedTuple

from .circuit import C2Z, C3Z, CZ, H, U3

# relative slack on radius comparisons, in units of d
RADIUS_TOL = 1e-9


class Coordinate(NamedTuple):
    x: int
    y: int


@dataclass(frozen=True)
class HardwareSpec:
    """Radii are in units of the lattice constant ``d`` (µm); times in µs."""

    l: int
    d: float
    r_int: float
    r_restr: float
    F_cz: float
    F_h: float
    F_shuttle: float
    t_u3: float
    t_cz: float
    t_ccz: float
    t_cccz: float
    v: float
    t_act: float
    t_deact: float
    T1: float
    T2: float
    n_atoms: int | None = None

    def __post_init__(self):
        if self.l < 1:
            raise ValueError("lattice side must be positive")
        if not self.r_restr >= self.r_int > 0:
            raise ValueError("need r_restr >= r_int > 0")
        for name in ("F_cz", "F_h", "F_shuttle"):
            f = getattr(self, name)
            if not 0 < f <= 1:
                raise ValueError(f"{name} must lie in (0, 1]")
        for name in ("d", "t_u3", "t_cz", "t_ccz", "t_cccz", "v", "t_act", "t_deact", "T1", "T2"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.n_atoms is not None and not 0 < self.n_atoms < self.l * self.l:
            raise ValueError("n_atoms must leave at least one free site")

    @property
    def T_eff(self) -> float:
        return self.T1 * self.T2 / (self.T1 + self.T2)

    @property
    def n_sites(self) -> int:
        return self.l * self.l

    def in_bounds(self, c: tuple[int, int]) -> bool:
        return 0 <= c[0] < self.l and 0 <= c[1] < self.l

    def site(self, index: int) -> Coordinate:
        """Row-major site enumeration starting at (0, 0)."""
        return Coordinate(index % self.l, index // self.l)

    def gate_time(self, kind: str) -> float:
        return {U3: self.t_u3, H: self.t_u3, CZ: self.t_cz, C2Z: self.t_ccz,
                C3Z: self.t_cccz}[kind]

    def gate_fidelity(self, kind: str) -> float:
        if kind in (U3, H):
            return self.F_h
        if kind in (CZ, C2Z, C3Z):
            return self.F_cz
        raise KeyError(kind)

    @property
    def swap_time(self) -> float:
        # critical path of the lowered SWAP: 4 single-qubit layers, 3 CZ
        return 3 * self.t_cz + 4 * self.t_u3

    @property
    def swap_fidelity(self) -> float:
        return self.F_cz ** 3 * self.F_h ** SWAP_H_COUNT

    def move_time(self, s_um: float) -> float:
        return self.t_act + s_um / self.v + self.t_deact


# H gates emitted per lowered SWAP (H_b CZ H_a H_b CZ H_a H_b CZ H_b)
SWAP_H_COUNT = 6


def within(a: tuple[int, int], b: tuple[int, int], radius: float) -> bool:
    """Euclidean lattice distance <= radius (both in units of d)."""
    dx, dy = a[0] - b[0], a[1] - b[1]
    return math.sqrt(dx * dx + dy * dy) <= radius + RADIUS_TOL


def rect_distance(a: tuple[int, int], b: tuple[int, int]) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


@lru_cache(maxsize=64)
def offsets_within(radius: float) -> tuple[tuple[int, int], ...]:
    """All non-zero lattice offsets inside the disc, nearest first."""
    r = int(math.floor(radius + RADIUS_TOL))
    offs = [(dx, dy) for dy in range(-r, r + 1) for dx in range(-r, r + 1)
            if (dx or dy) and within((0, 0), (dx, dy), radius)]
    offs.sort(key=lambda o: (o[0] ** 2 + o[1] ** 2, o[1], o[0]))
    return tuple(offs)


# ---------------------------------------------------------------------------
# presets and config files

_COMMON = dict(l=15, d=3.0, t_u3=0.5, t_cz=0.2, t_ccz=0.4, t_cccz=0.6,
               T1=1e8, T2=1.5e6, n_atoms=200)

PRESETS: dict[str, HardwareSpec] = {
    "shuttling": HardwareSpec(r_int=2.0, r_restr=2.0, F_cz=0.994, F_h=0.995, F_shuttle=1.0,
                              v=0.55, t_act=20.0, t_deact=20.0, **_COMMON),
    "gate": HardwareSpec(r_int=4.5, r_restr=4.5, F_cz=0.9995, F_h=0.9999, F_shuttle=0.999,
                         v=0.2, t_act=50.0, t_deact=50.0, **_COMMON),
    "mixed": HardwareSpec(r_int=2.5, r_restr=2.5, F_cz=0.995, F_h=0.999, F_shuttle=0.9999,
                          v=0.3, t_act=40.0, t_deact=40.0, **_COMMON),
}

_INT_FIELDS = {"l", "n_atoms"}


def parse_hardware(text: str) -> HardwareSpec:
    """Parse a flat ``key = value`` document; ``#`` starts a comment."""
    known = {f.name for f in fields(HardwareSpec)}
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if not sep or not key or not val:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        if key not in known:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = int(val) if key in _INT_FIELDS else float(val)
        except ValueError:
            raise ValueError(f"line {lineno}: bad value {val!r} for {key}") from None
    missing = known - set(values) - {"n_atoms"}
    if missing:
        raise ValueError(f"missing keys: {', '.join(sorted(missing))}")
    return HardwareSpec(**values)


def format_hardware(spec: HardwareSpec) -> str:
    lines = []
    for f in fields(HardwareSpec):
        val = getattr(spec, f.name)
        if val is not None:
            lines.append(f"{f.name} = {val!r}")
    return "\n".join(lines) + "\n"


def load_hardware(source: str | Path) -> HardwareSpec:
    """Load a preset by name or a config file by path."""
    if str(source) in PRESETS:
        return PRESETS[str(source)]
    return parse_hardware(Path(source).read_text(encoding="utf-8"))

