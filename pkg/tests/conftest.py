import numpy as np
import pytest

from qcomplementarity import states


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


def random_state(rng, dims, rank=None):
    """Independent sampler for property tests (not the package's keyed RNG)."""
    d = int(np.prod(dims))
    rank = rank or int(rng.integers(1, d + 1))
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    return states.MultipartiteState(rho / np.trace(rho).real, tuple(dims))


def local_unitary(rng, dims):
    u = np.eye(1)
    for d in dims:
        u = np.kron(u, states.random_unitary(d, rng))
    return u
