import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from causal_eval.graph import Dag

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def dags(draw, min_nodes=1, max_nodes=6):
    """DAG over V0..V{n-1}: random order, each forward pair an edge with prob. p."""
    n = draw(st.integers(min_nodes, max_nodes))
    names = [f"V{i}" for i in range(n)]
    order = draw(st.permutations(names))
    pairs = [(order[a], order[b]) for a in range(n) for b in range(a + 1, n)]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Dag(names, [e for e, keep in zip(pairs, mask) if keep])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_configure(config):
    config.acceptance_lines = []


def pytest_terminal_summary(terminalreporter, config):
    if config.acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(config.acceptance_lines, key=lambda l: int(l.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
