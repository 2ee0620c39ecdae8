import numpy as np
import pytest

from multicat.codes import coherent_code


@pytest.fixture(scope="session")
def pauli_code():
    return coherent_code("pauli8", 2.0, 2j)


@pytest.fixture(scope="session")
def clifford_code():
    return coherent_code("clifford96", 2.0, 2 * np.exp(1j * np.pi / 8))


@pytest.fixture(scope="session")
def small_pauli():
    return coherent_code("pauli8", 1.5, 1.5j)


@pytest.fixture(scope="session")
def small_clifford():
    return coherent_code("clifford96", 1.5, 1.5 * np.exp(1j * np.pi / 8))
