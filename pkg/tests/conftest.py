import pytest

from dipmag.core import LatticeSpec, ModelParams

from helpers import ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def params():
    return ModelParams()


@pytest.fixture
def finite16():
    return ModelParams(lattice=LatticeSpec.finite(16))
