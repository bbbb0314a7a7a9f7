import numpy as np
import pytest


def ginibre(rng, n):
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)


def selfadjoint(rng, n):
    G = ginibre(rng, n)
    return 0.5 * (G + G.conj().T)


def posdef(rng, n, shift=1e-3):
    G = ginibre(rng, n)
    return G @ G.conj().T + shift * np.eye(n)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
