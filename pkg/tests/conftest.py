import sys

import numpy as np
import pytest

from awediv.core import OracleMatrix


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_oracle(rng, max_n=20, max_l=6, p_correct=None):
    n = int(rng.integers(1, max_n + 1))
    L = int(rng.integers(2, max_l + 1))
    p = rng.uniform(0.2, 0.95) if p_correct is None else p_correct
    return OracleMatrix(rng.random((n, L)) < p)


@pytest.fixture
def make_oracle(rng):
    return lambda **kw: random_oracle(rng, **kw)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.RESULTS:
        terminalreporter.write_line(line)
