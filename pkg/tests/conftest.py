import numpy as np
import pytest

from qps.generators import DenseGenerator, PauliZSubset, PhaseShift
from qps.linalg import StateVector
from qps.rng import RandomStream


class FixedStream:
    """Scripted stand-in for RandomStream: uniform() replays given values."""

    def __init__(self, values):
        self._values = list(values)
        self.drawn = 0

    def uniform(self):
        if not self._values:
            raise AssertionError("FixedStream exhausted")
        self.drawn += 1
        return self._values.pop(0)


class AlwaysFail(FixedStream):
    """Every draw lands in the failure branch (u just under 1)."""

    def __init__(self):
        self._values = None
        self.drawn = 0

    def uniform(self):
        self.drawn += 1
        return 1.0 - 1e-12


class AlwaysSucceed(AlwaysFail):
    def uniform(self):
        self.drawn += 1
        return 0.0


def np_rng(seed=0):
    return np.random.default_rng(seed)


def random_unitary(dim, rng):
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(dim, rng):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (g + g.conj().T) / 2


def dense_self_inverse(num_qubits, rng):
    """Random dense generator built the slow, explicit way: V diag(+-1) V^dag."""
    dim = 1 << num_qubits
    v = random_unitary(dim, rng)
    signs = rng.choice([-1.0, 1.0], size=dim)
    if np.all(signs == 1.0):
        signs[0] = -1.0
    return DenseGenerator((v * signs) @ v.conj().T)


def random_state_np(num_qubits, rng):
    dim = 1 << num_qubits
    amps = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return StateVector(amps / np.linalg.norm(amps))


def generator_zoo(max_qubits=3, seed=11):
    """A spread of generator variants for parametrized checks."""
    rng = np_rng(seed)
    zoo = [
        PauliZSubset(1, frozenset({1})),
        PauliZSubset(2, frozenset({1, 2})),
        PauliZSubset(3, frozenset({2})),
        PauliZSubset(max_qubits, frozenset(range(1, max_qubits + 1))),
        PhaseShift(1),
        PhaseShift(2),
        PhaseShift(max_qubits),
        dense_self_inverse(1, rng),
        dense_self_inverse(2, rng),
    ]
    return zoo


@pytest.fixture
def stream():
    return RandomStream(20250214)
