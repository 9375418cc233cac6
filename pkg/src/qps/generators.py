"""Self-inverse generators and the unitaries they generate.

A generator ``B`` here is both Hermitian and unitary, so ``B @ B == I``.
For such a ``B`` and any real angle ``theta``,

    exp(-i*(theta/2)*B) == cos(theta/2)*I - i*sin(theta/2)*B,

which is the decomposition that lets the whole operator family ride on a
single pair of amplitudes.  Three constructions are provided:

* :class:`PauliZSubset` -- a tensor product with ``sigma_z`` on a chosen
  subset of the data qubits and identity elsewhere (the coupling family).
* :class:`PhaseShift` -- the diagonal generator whose rotation equals the
  phase-shift gate ``diag(1, ..., 1, e^{i*theta})`` up to an overall phase.
* :class:`DenseGenerator` -- any explicit matrix, validated self-inverse at
  construction.

Data-qubit indices are 1-based, with qubit 1 on the most significant bit
(see :mod:`qps.linalg`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from . import linalg
from .linalg import MATRIX_ATOL, MAX_QUBITS
from .rng import RandomStream

# A data register leaves one qubit of headroom for the carrier/control qubit.
MAX_DATA_QUBITS = MAX_QUBITS - 1


def _check_num_qubits(n: int) -> None:
    if not 1 <= n <= MAX_DATA_QUBITS:
        raise ValueError(f"data register must have 1..{MAX_DATA_QUBITS} qubits, got {n}")


def _check_subset(subset: frozenset, num_qubits: int) -> None:
    if not subset:
        raise ValueError("generator subset must be nonempty")
    bad = [i for i in subset if not 1 <= int(i) <= num_qubits]
    if bad:
        raise ValueError(f"subset indices {bad} outside 1..{num_qubits}")


@dataclass(frozen=True)
class PauliZSubset:
    """``sigma_z`` on every qubit in ``subset``, identity on the rest."""

    num_qubits: int
    subset: frozenset

    def __post_init__(self):
        object.__setattr__(self, "subset", frozenset(int(i) for i in self.subset))
        _check_num_qubits(self.num_qubits)
        _check_subset(self.subset, self.num_qubits)

    def diagonal(self) -> np.ndarray:
        """Diagonal of the generator: ``prod_{i in subset} (-1)**bit_i(k)``."""
        n = self.num_qubits
        k = np.arange(1 << n)
        parity = np.zeros(1 << n, dtype=np.int64)
        for i in self.subset:
            parity ^= (k >> (n - i)) & 1
        return np.where(parity == 1, -1.0, 1.0)

    def matrix(self) -> np.ndarray:
        return np.diag(self.diagonal()).astype(np.complex128)


@dataclass(frozen=True)
class PhaseShift:
    """Diagonal generator ``diag(1, ..., 1, -1)``.

    Acts as ``sigma_z`` on the last qubit when qubits ``1..n-1`` are all
    ``|1>`` and as identity otherwise; its rotation by ``theta`` equals the
    phase-shift gate ``diag(1, ..., 1, e^{i*theta})`` up to the overall
    phase ``e^{-i*theta/2}``.
    """

    num_qubits: int

    def __post_init__(self):
        _check_num_qubits(self.num_qubits)

    def diagonal(self) -> np.ndarray:
        d = np.ones(1 << self.num_qubits)
        d[-1] = -1.0
        return d

    def matrix(self) -> np.ndarray:
        return np.diag(self.diagonal()).astype(np.complex128)


class DenseGenerator:
    """An explicit generator matrix, validated self-inverse at construction.

    The retrieval scheme silently produces garbage for a generator that is
    not self-inverse, so this fails fast instead.
    """

    __slots__ = ("_matrix", "num_qubits")

    def __init__(self, matrix):
        arr = np.array(matrix, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"generator matrix must be square, got {arr.shape}")
        n = arr.shape[0].bit_length() - 1
        if (1 << n) != arr.shape[0]:
            raise ValueError(f"generator dimension {arr.shape[0]} is not a power of two")
        _check_num_qubits(n)
        if not linalg.is_self_inverse(arr, MATRIX_ATOL):
            raise ValueError("generator must be Hermitian with B @ B == I")
        arr.setflags(write=False)
        self._matrix = arr
        self.num_qubits = n

    def diagonal(self) -> None:
        """Dense generators take the general matrix path."""
        return None

    def matrix(self) -> np.ndarray:
        return self._matrix

    def __eq__(self, other) -> bool:
        return isinstance(other, DenseGenerator) and bool(
            np.array_equal(self._matrix, other._matrix)
        )

    def __repr__(self) -> str:
        return f"DenseGenerator(dim={self._matrix.shape[0]})"


Generator = Union[PauliZSubset, PhaseShift, DenseGenerator]


def rotation(generator: Generator, theta: float) -> np.ndarray:
    """``cos(theta/2)*I - i*sin(theta/2)*B``: the stored operator at ``theta``."""
    b = generator.matrix()
    dim = b.shape[0]
    return math.cos(theta / 2) * np.eye(dim, dtype=np.complex128) - (
        1j * math.sin(theta / 2)
    ) * b


def controlled(generator: Generator) -> np.ndarray:
    """Block matrix ``[[I, 0], [0, B]]`` with the control qubit most significant."""
    b = generator.matrix()
    dim = b.shape[0]
    out = np.eye(2 * dim, dtype=np.complex128)
    out[dim:, dim:] = b
    return out


def phase_shift_equivalence(num_qubits: int, theta: float, tol: float = MATRIX_ATOL) -> bool:
    """Check that the rotated :class:`PhaseShift` is the phase-shift gate.

    True iff ``e^{i*theta/2} * rotation(PhaseShift(n), theta)`` equals
    ``diag(1, ..., 1, e^{i*theta})`` entrywise within ``tol``.
    """
    u = rotation(PhaseShift(num_qubits), theta)
    target = np.eye(1 << num_qubits, dtype=np.complex128)
    target[-1, -1] = np.exp(1j * theta)
    return bool(np.max(np.abs(np.exp(0.5j * theta) * u - target)) <= tol)


def random_self_inverse(num_qubits: int, rng: RandomStream) -> DenseGenerator:
    """Random dense generator: ``V diag(+-1) V^dagger`` for Haar-ish unitary ``V``."""
    dim = 1 << num_qubits
    raw = linalg.gaussians(rng, 2 * dim * dim)
    ginn = (raw[0::2] + 1j * raw[1::2]).reshape(dim, dim)
    v, r = np.linalg.qr(ginn)
    v = v * (np.diag(r) / np.abs(np.diag(r)))
    signs = np.where(np.array([rng.uniform() for _ in range(dim)]) < 0.5, -1.0, 1.0)
    if np.all(signs == 1.0):
        signs[0] = -1.0  # avoid the degenerate identity generator
    return DenseGenerator((v * signs) @ v.conj().T)


def load_matrix(path) -> np.ndarray:
    """Read a matrix file: one row per line, whitespace-separated ``re,im`` pairs."""
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        entries = []
        for token in line.split():
            try:
                re_s, im_s = token.split(",")
                entries.append(complex(float(re_s), float(im_s)))
            except ValueError:
                raise ValueError(
                    f"{path}:{lineno}: bad entry {token!r}, expected 're,im'"
                ) from None
        rows.append(entries)
    if not rows or any(len(r) != len(rows) for r in rows):
        raise ValueError(f"{path}: matrix must be square and nonempty")
    return np.array(rows, dtype=np.complex128)


def save_matrix(path, matrix) -> None:
    """Inverse of :func:`load_matrix`."""
    m = np.asarray(matrix, dtype=np.complex128)
    lines = [
        " ".join(f"{float(e.real)!r},{float(e.imag)!r}" for e in row) for row in m
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def parse_generator(spec: str, num_qubits: int | None = None) -> Generator:
    """Build a generator from CLI text syntax.

    ``z:<i>,<j>,...`` selects :class:`PauliZSubset` (register size defaults
    to the largest index), ``ps:<n>`` selects :class:`PhaseShift`, and
    ``dense:<path>`` loads a matrix file.
    """
    kind, _, rest = spec.partition(":")
    if kind == "z":
        try:
            subset = frozenset(int(tok) for tok in rest.split(","))
        except ValueError:
            raise ValueError(f"bad subset in generator spec {spec!r}") from None
        return PauliZSubset(num_qubits or max(subset), subset)
    if kind == "ps":
        try:
            n = int(rest)
        except ValueError:
            raise ValueError(f"bad qubit count in generator spec {spec!r}") from None
        if num_qubits is not None and num_qubits != n:
            raise ValueError(f"generator spec {spec!r} conflicts with --qubits {num_qubits}")
        return PhaseShift(n)
    if kind == "dense":
        gen = DenseGenerator(load_matrix(rest))
        if num_qubits is not None and num_qubits != gen.num_qubits:
            raise ValueError(
                f"matrix in {rest!r} has {gen.num_qubits} qubits, not {num_qubits}"
            )
        return gen
    raise ValueError(f"unknown generator spec {spec!r} (want z:..., ps:..., dense:...)")
