import numpy as np
import pytest

ACCEPTANCE_LINES = []


def random_density(n, rng, rank=None):
    d = 2 ** n
    k = rank or d
    a = rng.normal(size=(d, k)) + 1j * rng.normal(size=(d, k))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_hermitian(d, rng, scale=1.0):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return scale * 0.5 * (a + a.conj().T)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
