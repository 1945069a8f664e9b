import numpy as np
import pytest

from tourdiag import simdata


@pytest.fixture
def rng():
    return np.random.default_rng(20240101)


@pytest.fixture(scope="session")
def boa5():
    return simdata.boa5(1000, 1)


@pytest.fixture(scope="session")
def boa6():
    return simdata.boa6(1000, 1)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import VERDICTS
    except ImportError:
        return
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(VERDICTS):
            terminalreporter.write_line(VERDICTS[k])
