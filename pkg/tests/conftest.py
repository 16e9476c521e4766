import numpy as np
import pytest

from tickmoments import Trades


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def pair_trades():
    """Two trades, (p=10, U=2) and (p=12, U=3), one second apart."""
    return Trades.from_arrays([0, 1_000_000_000], [10.0, 12.0], [2.0, 3.0])


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[num])
