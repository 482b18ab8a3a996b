import itertools

import numpy as np
import pytest

from gfscore import Dataset, center_columns
from gfscore.solver import indicator

ACCEPTANCE_LINES = []


def random_dataset(rng, d, n, c, signal=0.7, center=True):
    """Random labelled data with every class present and a few informative rows."""
    y = np.concatenate([np.arange(1, c + 1), rng.integers(1, c + 1, n - c)])
    rng.shuffle(y)
    X = rng.normal(size=(d, n))
    k = max(1, d // 3)
    X[:k] += signal * rng.normal(size=(k, c))[:, y - 1]
    ds = Dataset(X, y)
    return center_columns(ds) if center else ds


def all_indicators(d, m):
    return np.array([indicator(c, d) for c in itertools.combinations(range(d), m)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
