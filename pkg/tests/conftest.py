import numpy as np
import pytest

from entcheck.core.tensor import CoeffTensor, Tolerances
from entcheck.services.corpus import CORPUS_DIR


@pytest.fixture
def tol():
    return Tolerances()


@pytest.fixture
def corpus_dir():
    return CORPUS_DIR


@pytest.fixture
def product_3x3():
    # (1, −2, 3) ⊗ (4, −3i, 5)
    return CoeffTensor.from_array([
        [4, -3j, 5],
        [-8, 6j, -10],
        [12, -9j, 15],
    ])


@pytest.fixture
def degenerate_product():
    # (φ1 − φ2) ⊗ (ψ1 − ψ2)
    return CoeffTensor.from_array([[1, -1], [-1, 1]])


@pytest.fixture
def degenerate_entangled():
    # φ1 ⊗ (ψ1 − ψ2) + φ2 ⊗ (ψ3 − ψ4)
    return CoeffTensor.from_array([[1, -1, 0, 0], [0, 0, 1, -1]])


@pytest.fixture
def ghz():
    entries = np.zeros((2, 2, 2), dtype=complex)
    entries[0, 0, 0] = entries[1, 1, 1] = 1
    return CoeffTensor(entries)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
