import numpy as np
import pytest

from tvefficiency.ingest import ReturnSeries

# Lines collected by tests/test_acceptance.py and echoed after the run.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def ar1_series(alpha, T, seed, intercept=0.0, burn=200):
    g = np.random.default_rng(seed)
    e = g.standard_normal(T + burn)
    x = np.zeros(T + burn)
    for t in range(1, T + burn):
        x[t] = intercept + alpha * x[t - 1] + e[t]
    return ReturnSeries.from_array(x[burn:])
