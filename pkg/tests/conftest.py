import numpy as np
import pytest

from markovscope import TripartiteState
from markovscope.sampling import random_density

ACCEPTANCE_LINES = []


def ghz_state():
    psi = np.zeros(8)
    psi[0] = psi[7] = 2**-0.5
    return TripartiteState(np.outer(psi, psi), (2, 2, 2))


def product_state(rng, dims=(2, 2, 2)):
    a, b, c = (random_density(rng, d) for d in dims)
    return TripartiteState(np.kron(np.kron(a, b), c), dims), (a, b, c)


def random_state(rng, dims=(2, 2, 2), env_dim=None):
    return TripartiteState(random_density(rng, int(np.prod(dims)), env_dim), dims)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def ghz():
    return ghz_state()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
