import numpy as np
import pytest

from mjmcmc.models import ExplicitModel


@pytest.fixture
def quirk_model():
    """Two elements; state (1,1) is rare, the other three share the rest."""
    # bit-packed order: code = m_0 + 2 m_1, so (1,1) is code 3
    return ExplicitModel(probs=[0.33, 0.33, 0.33, 0.01])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
