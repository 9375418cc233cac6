"""Dense complex state vectors, operator matrices, and comparison predicates.

Conventions used throughout the package:

* Basis indices read qubit 1 as the most significant bit: the basis label
  ``|x1 x2 ... xn>`` maps to the integer ``x1*2**(n-1) + ... + xn``.
* When a control/carrier qubit is joined to a data register it occupies the
  most significant position, so the joint index is
  ``control_bit * 2**n + data_index``.
* ``kron(a, b)`` places its first argument on the more significant qubits.
* Physical state comparisons are insensitive to global phase; use
  :func:`fidelity_up_to_phase` rather than amplitude equality.

Matrices are plain ``complex128`` ndarrays.  :class:`StateVector` wraps its
amplitude array to pin the normalization invariant; instances are immutable
and safe to share across threads.  Everything is dense and capped at
``MAX_QUBITS`` total qubits.
"""

from __future__ import annotations

import math

import numpy as np

from .rng import RandomStream

MAX_QUBITS = 12  # dense dim 4096; everything here is verifiable well below this

NORM_ATOL = 1e-12
MATRIX_ATOL = 1e-10
STATE_ATOL = 1e-10

IDENTITY_2 = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2)

for _m in (IDENTITY_2, PAULI_X, PAULI_Z, HADAMARD):
    _m.setflags(write=False)


class DimensionMismatchError(ValueError):
    """Operands act on different numbers of qubits."""


class NotUnitaryError(ValueError):
    """A matrix required to be unitary is not, within tolerance."""


def _as_matrix(m) -> np.ndarray:
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def _check_pow2(dim: int, what: str) -> int:
    n = dim.bit_length() - 1
    if dim <= 0 or (1 << n) != dim:
        raise ValueError(f"{what} dimension {dim} is not a power of two")
    return n


class StateVector:
    """Normalized complex amplitude vector over ``num_qubits`` qubits.

    The constructor validates shape, finiteness, and normalization (within
    ``NORM_ATOL``); the stored array is frozen.  All operations that produce
    states return new instances.
    """

    __slots__ = ("_amps", "_num_qubits")

    def __init__(self, amps):
        arr = np.array(amps, dtype=np.complex128).reshape(-1)
        n = _check_pow2(arr.size, "state")
        if n < 1:
            raise ValueError("a state needs at least one qubit")
        if n > MAX_QUBITS:
            raise ValueError(f"{n} qubits exceeds the dense limit of {MAX_QUBITS}")
        if not np.all(np.isfinite(arr.view(np.float64))):
            raise ValueError("state amplitudes must be finite")
        norm = float(np.linalg.norm(arr))
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValueError(f"state is not normalized: |amps| = {norm!r}")
        arr.setflags(write=False)
        self._amps = arr
        self._num_qubits = n

    @property
    def amps(self) -> np.ndarray:
        """Read-only amplitude array of length ``2**num_qubits``."""
        return self._amps

    @property
    def num_qubits(self) -> int:
        return self._num_qubits

    @property
    def dim(self) -> int:
        return self._amps.size

    @classmethod
    def zero(cls, num_qubits: int) -> "StateVector":
        """The all-zeros basis state ``|0...0>``."""
        return cls.basis(num_qubits, 0)

    @classmethod
    def basis(cls, num_qubits: int, index: int) -> "StateVector":
        amps = np.zeros(1 << num_qubits, dtype=np.complex128)
        amps[index] = 1.0
        return cls(amps)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, StateVector)
            and self._num_qubits == other._num_qubits
            and bool(np.array_equal(self._amps, other._amps))
        )

    def __hash__(self):
        return hash((self._num_qubits, self._amps.tobytes()))

    def __repr__(self) -> str:
        return f"StateVector(num_qubits={self._num_qubits}, amps={self._amps!r})"


def kron(a, b) -> np.ndarray:
    """Kronecker product with the first factor on the most significant qubits."""
    a = _as_matrix(a)
    b = _as_matrix(b)
    _check_pow2(a.shape[0], "left factor")
    _check_pow2(b.shape[0], "right factor")
    dim = a.shape[0] * b.shape[0]
    if dim > (1 << MAX_QUBITS):
        raise ValueError(f"product dimension {dim} exceeds the dense limit")
    return np.kron(a, b)


def is_unitary(m, tol: float = MATRIX_ATOL) -> bool:
    m = _as_matrix(m)
    return bool(np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0]))) <= tol)


def is_hermitian(m, tol: float = MATRIX_ATOL) -> bool:
    m = _as_matrix(m)
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def is_self_inverse(m, tol: float = MATRIX_ATOL) -> bool:
    """True iff ``m`` squares to the identity and is Hermitian, within ``tol``.

    These two properties together make ``m`` a valid generator: Hermitian
    (an observable) and unitary (implementable), with ``m @ m == I``.
    """
    m = _as_matrix(m)
    if m.shape[0] == 0:
        return False
    return bool(np.max(np.abs(m @ m - np.eye(m.shape[0]))) <= tol) and is_hermitian(m, tol)


def apply(m, v: StateVector) -> StateVector:
    """Apply the unitary ``m`` to ``v``; rejects non-unitary matrices."""
    m = _as_matrix(m)
    if m.shape[0] != v.dim:
        raise DimensionMismatchError(
            f"matrix dim {m.shape[0]} does not match state dim {v.dim}"
        )
    if not is_unitary(m):
        raise NotUnitaryError("matrix is not unitary within tolerance")
    return StateVector(m @ v.amps)


def fidelity_up_to_phase(a: StateVector, b: StateVector) -> float:
    """``|<a|b>|``: 1 iff the states agree up to a global phase, 0 iff orthogonal."""
    if a.num_qubits != b.num_qubits:
        raise DimensionMismatchError(
            f"states have {a.num_qubits} and {b.num_qubits} qubits"
        )
    return float(abs(np.vdot(a.amps, b.amps)))


def prepend_qubit(amp0: complex, amp1: complex, data: StateVector) -> np.ndarray:
    """Raw amplitudes of ``(amp0|0> + amp1|1>)`` joined above ``data``."""
    return np.concatenate((amp0 * data.amps, amp1 * data.amps))


def exponentiate_hermitian(m, theta: float) -> np.ndarray:
    """``exp(-i*(theta/2)*m)`` for Hermitian ``m``, via eigendecomposition.

    Serves as the in-package route independent of the cos/sin shortcut that
    self-inverse generators admit.
    """
    m = _as_matrix(m)
    if not is_hermitian(m):
        raise ValueError("matrix exponential shortcut requires a Hermitian matrix")
    evals, vecs = np.linalg.eigh(m)
    phases = np.exp(-0.5j * theta * evals)
    return (vecs * phases) @ vecs.conj().T


def gaussians(rng: RandomStream, count: int) -> np.ndarray:
    """``count`` standard normals from ``rng`` via Box-Muller."""
    out = np.empty(count)
    for i in range(0, count, 2):
        r = math.sqrt(-2.0 * math.log(1.0 - rng.uniform()))
        phi = 2.0 * math.pi * rng.uniform()
        out[i] = r * math.cos(phi)
        if i + 1 < count:
            out[i + 1] = r * math.sin(phi)
    return out


def random_state(num_qubits: int, rng: RandomStream) -> StateVector:
    """Haar-ish random state: normalized complex Gaussian amplitudes."""
    dim = 1 << num_qubits
    raw = gaussians(rng, 2 * dim)
    amps = raw[0::2] + 1j * raw[1::2]
    return StateVector(amps / np.linalg.norm(amps))
