import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

DESK_H = 2 * np.pi / 256
DESK_M = 2048


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def desk_grid():
    from bigridlab import make_grid
    return make_grid(DESK_H, DESK_M)


def random_complex(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(RESULTS.values(), key=lambda l: _criterion_order(l.split()[1])):
        terminalreporter.write_line(line)


def _criterion_order(cid):
    digits = "".join(c for c in cid if c.isdigit())
    return int(digits), cid
