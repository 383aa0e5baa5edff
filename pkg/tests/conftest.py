from __future__ import annotations

import pytest

from gradedhom.fixtures import all_rings, random_module, ring, standard_modules
from gradedhom.homalg import Dualizer

RING_NAMES = ("R1", "R2", "R3", "R4", "R5")
RANDOM_SEEDS = (0, 1)


def fixture_modules(name: str) -> dict:
    """R, k, R/(x), Omega^1 k and one random cokernel per seed."""
    R = ring(name)
    mods = standard_modules(R)
    for s in RANDOM_SEEDS:
        mods[f"random[{s}]"] = random_module(R, s)
    return mods


@pytest.fixture(scope="session")
def rings():
    return all_rings()


@pytest.fixture(scope="session")
def R1():
    return ring("R1")


@pytest.fixture(scope="session")
def R2():
    return ring("R2")


@pytest.fixture(scope="session")
def R3():
    return ring("R3")


@pytest.fixture(scope="session")
def R4():
    return ring("R4")


@pytest.fixture(scope="session")
def R5():
    return ring("R5")


@pytest.fixture(scope="session")
def self_dualizers():
    return {name: Dualizer.ring(ring(name)) for name in RING_NAMES}


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[n])
