import json
import os
import sys

import numpy as np
import pytest

HERE = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, HERE)

from l0clf.data import SyntheticSpec, gen_synthetic  # noqa: E402

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def frozen():
    with open(os.path.join(HERE, "frozen_oracles.json")) as fh:
        return json.load(fh)


def instance(n=80, p=12, k=3, seed=0, correlation="identity", rho=0.0,
             s=1.0):
    spec = SyntheticSpec(n, p, k, correlation, rho, s)
    return gen_synthetic(spec, seed)


def random_dense(rng, n, p, scale=1.0):
    X = rng.standard_normal((n, p)) * scale
    y = np.where(rng.random(n) < 0.5, -1.0, 1.0)
    y[0], y[-1] = 1.0, -1.0
    return X, y


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line[1])
