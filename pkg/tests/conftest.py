from dataclasses import replace

import pytest
from hypothesis import settings

from hybridmap.hardware import PRESETS
from hybridmap.mapping import MappingState

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def make_spec(**over):
    base = dict(n_atoms=None)
    base.update(over)
    return replace(PRESETS["mixed"], **base)


def make_state(spec, positions, n=None):
    return MappingState(spec, len(positions) if n is None else n, positions)


@pytest.fixture
def mixed():
    return PRESETS["mixed"]


ACCEPTANCE: list[str] = []


def record_acceptance(number: int, ok: bool, detail: str) -> str:
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE.append(line)
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
