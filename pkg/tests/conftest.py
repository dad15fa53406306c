import numpy as np
import pytest

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)
I2 = np.eye(2, dtype=complex)
S01 = np.array([[0, 1], [0, 0]], dtype=complex)
S10 = np.array([[0, 0], [1, 0]], dtype=complex)

# Single-asset market data used throughout.
R, SIGMA, K = 0.02, 0.3, 30.0
XMIN, XMAX = np.log(1e-4), np.log(300.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_matrix(rng, n):
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
