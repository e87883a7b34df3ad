import pytest

from spfwm.experiments import Source
from spfwm.material import GlassComposition
from spfwm.modes import FiberGeometry

DOPING = GlassComposition(0.067)


@pytest.fixture(scope="session")
def source_400():
    return Source.design(FiberGeometry(4.0, DOPING), grid_n=256)


@pytest.fixture(scope="session")
def source_465():
    return Source.design(FiberGeometry(4.65, DOPING), grid_n=256)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
