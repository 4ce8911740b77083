import numpy as np
import pytest

from quatdom.quaternion import QMatrix


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_qmatrix(rng, m, n, structure="general"):
    a = rng.normal(size=(m, n, 4))
    if structure == "hermitian":
        a = a + a.swapaxes(0, 1) * np.array([1, -1, -1, -1])
        a[np.arange(m), np.arange(m), 1:] = 0.0
    return QMatrix(a, structure)


def random_pd(rng, n):
    g = random_qmatrix(rng, n, n)
    h = g @ g.adjoint()
    data = (h.data + h.adjoint().data) / 2 + np.eye(n)[..., None] * np.array([0.1, 0, 0, 0])
    return QMatrix(data, "hermitian")


# Acceptance results are collected here and printed at the end of the run.
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: int(k.split("-")[1])):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
