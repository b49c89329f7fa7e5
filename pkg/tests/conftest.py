import numpy as np
import pytest

from ergoquench import ModelSpec, build_hamiltonian


def random_hermitian(rng, dim):
    x = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (x + x.conj().T)


def random_density(rng, dim):
    x = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = x @ x.conj().T
    return rho / np.trace(rho).real


@pytest.fixture(scope="session")
def model2():
    return ModelSpec(n_qubits=2, field_h=0.1)


@pytest.fixture(scope="session")
def model4():
    return ModelSpec(n_qubits=4, field_h=0.1)


@pytest.fixture(scope="session")
def h2(model2):
    return build_hamiltonian(model2)


@pytest.fixture(scope="session")
def h4(model4):
    return build_hamiltonian(model4)
