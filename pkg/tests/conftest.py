import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_distance_matrix(rng, n, ties=False, duplicates=False):
    """Random symmetric zero-diagonal matrix; optionally with tied or zero entries."""
    if ties:
        m = rng.integers(1, 4, size=(n, n)).astype(float)
    else:
        m = rng.uniform(0.1, 10.0, size=(n, n))
    m = np.triu(m, 1)
    m = m + m.T
    if duplicates and n >= 3:
        # point j becomes an exact copy of point i
        i, j = rng.choice(n, size=2, replace=False)
        m[j, :] = m[i, :]
        m[:, j] = m[:, i]
        m[i, j] = m[j, i] = m[j, j] = 0.0
    return m


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
