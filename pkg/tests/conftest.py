import numpy as np
import pytest

from relbc.states import WavepacketSpec, default_grid

# Lines appended by test_acceptance; echoed at the end of the session.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def spec():
    return WavepacketSpec()


@pytest.fixture(scope="session")
def grid(spec):
    """Protocol grid, long enough for delays up to 2*tau0."""
    return default_grid(spec, max_delay=2 * spec.tau0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
