import numpy as np
import pytest

from cavitygates.gates import reference_params
from cavitygates.hamiltonian import DETUNING_NAMES, COUPLING_NAMES


def random_hermitian(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (m + m.conj().T) / 2


def random_params(rng: np.random.Generator, gate: str, lo: float = 5.0, hi: float = 60.0) -> dict[str, float]:
    """Random couplings near 1 and detunings of random sign and size."""
    params = {k: float(rng.uniform(0.5, 1.5)) for k in COUPLING_NAMES[gate]}
    for k in DETUNING_NAMES[gate]:
        params[k] = float(rng.choice([-1, 1]) * rng.uniform(lo, hi))
    return params


@pytest.fixture(scope="session")
def fig4_params():
    return reference_params("fredkin", 20.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
