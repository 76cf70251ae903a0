import json
from pathlib import Path

import pytest

from robin_disk.config import DiskConfig
from robin_disk.verify import make_setup

FIXTURES = Path(__file__).parent / "fixtures"
ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture(scope="session")
def oracle():
    return json.loads((FIXTURES / "oracle.json").read_text())


@pytest.fixture(scope="session")
def default_setup():
    """lam = -1, mu = 0, L = N = 6 on the default 96 x 64 grid."""
    return make_setup(DiskConfig())


@pytest.fixture(scope="session")
def massive_setup():
    return make_setup(DiskConfig(mass=0.8, l_max=4, n_max=4))


@pytest.fixture(scope="session")
def small_setup():
    """L = N = 3 with a grid sized for double integrals."""
    return make_setup(DiskConfig(mass=0.5, l_max=3, n_max=3), 48, 32)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
