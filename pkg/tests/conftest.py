import numpy as np
import pytest
from hypothesis import strategies as st

from twocoin.hilbert import random_vector

# criterion number -> (passed, line); filled by test_acceptance
ACCEPTANCE: dict = {}


@st.composite
def qubits(draw):
    """Normalized random qubit, drawn through a seeded generator so shrinking stays meaningful."""
    seed = draw(st.integers(0, 2**32 - 1))
    return random_vector(2, np.random.default_rng(seed))


@st.composite
def qudits(draw, dim):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_vector(dim, np.random.default_rng(seed))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k][1])
