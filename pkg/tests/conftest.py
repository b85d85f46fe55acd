import pytest

from gluewalk.experiment import (
    DEFAULT_ETAS,
    ExperimentConfig,
    optimize_initial_coin,
    run_walk,
)
from gluewalk.graph import GluedTreesSpec
from gluewalk.walk import default_initial_condition

_ACCEPTANCE = []


@pytest.fixture(scope="session")
def g6_coin():
    return optimize_initial_coin(GluedTreesSpec(6), 25)


@pytest.fixture(scope="session")
def g6_trace(g6_coin):
    """G'6 over the default eta grid, 27 steps, optimized initial coin."""
    init = default_initial_condition(g6_coin.beta)
    return run_walk(ExperimentConfig(GluedTreesSpec(6), 27, DEFAULT_ETAS, init))


@pytest.fixture
def report():
    def record(number, name, passed, detail=""):
        _ACCEPTANCE.append((number, name, bool(passed), detail))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, passed, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {number}. {name}: {detail}")
