import random

import pytest
from hypothesis import settings

from bogomolov import generators as gen

settings.register_profile("default", max_examples=80, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture
def lorentz2():
    from bogomolov.hodge_lattice import PolarizedLattice

    return PolarizedLattice.diagonal([1, -1])


def lattices(seed: int, count: int, dims=(2, 3, 4, 5)):
    rng = random.Random(seed)
    return [gen.random_lattice(rng, rng.choice(dims)) for _ in range(count)]


CRITERIA: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        CRITERIA.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERIA, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
