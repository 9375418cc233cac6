"""Classical command words and the general gate array they drive.

A machine over ``n`` data qubits understands two instruction layers picked
by the extra bit ``c0``:

* ``c0 = 0``: a *coupling* -- apply the operator generated by ``sigma_z``
  on the selected qubit subset at some angle.  The angle itself travels in
  an angle state, never in the word; the word only says which per-qubit
  controlled-``sigma_z`` gates are live.  There are ``2**n - 1`` such
  generators, one per nonempty subset.
* ``c0 = 1``: fixed NOT gates on the selected qubits.  No angle state, no
  measurement, deterministic.

A word selects exactly one layer; mixed X-and-coupling words are invalid.
Command words are plain classical bits here: mapping generators onto
basis states of a quantum register is equivalent to using classical bits,
so that is what goes on the wire.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .generators import PauliZSubset, controlled, rotation
from .linalg import IDENTITY_2, PAULI_X, PAULI_Z, StateVector, kron
from .retrieval import AngleState, RetrievalOutcome, make_angle_state, retrieval_step
from .rng import RandomStream


class InvalidCommandError(ValueError):
    """A command word that selects no gates, or a malformed encoding."""


@dataclass(frozen=True)
class Coupling:
    """Instruction: rotate by ``theta`` under ``sigma_z`` on ``qubits``."""

    qubits: frozenset
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "qubits", frozenset(int(i) for i in self.qubits))
        if not self.qubits:
            raise InvalidCommandError("coupling needs a nonempty qubit subset")


@dataclass(frozen=True)
class NotGates:
    """Instruction: apply X to every qubit in ``qubits``."""

    qubits: frozenset

    def __post_init__(self):
        object.__setattr__(self, "qubits", frozenset(int(i) for i in self.qubits))
        if not self.qubits:
            raise InvalidCommandError("NOT layer needs a nonempty qubit subset")


Instruction = Union[Coupling, NotGates]


@dataclass(frozen=True)
class CouplingSkeleton:
    """A decoded coupling command: subset known, angle not recoverable."""

    qubits: frozenset


@dataclass(frozen=True)
class CommandWord:
    """``n + 1`` classical bits: layer flag ``c0`` plus one bit per qubit."""

    c0: int
    bits: tuple

    def __post_init__(self):
        object.__setattr__(self, "bits", tuple(int(b) for b in self.bits))
        if self.c0 not in (0, 1):
            raise InvalidCommandError(f"c0 must be 0 or 1, got {self.c0}")
        if not self.bits or any(b not in (0, 1) for b in self.bits):
            raise InvalidCommandError("qubit bits must be a nonempty 0/1 sequence")
        if not any(self.bits):
            raise InvalidCommandError("command selects no gates (all-zero subset)")

    @property
    def num_qubits(self) -> int:
        return len(self.bits)

    def subset(self) -> frozenset:
        return frozenset(i + 1 for i, b in enumerate(self.bits) if b)

    def as_string(self) -> str:
        """Serialized bit string ``c0 || c1..cn``."""
        return str(self.c0) + "".join(str(b) for b in self.bits)

    @classmethod
    def from_string(cls, text: str) -> "CommandWord":
        if len(text) < 2 or any(ch not in "01" for ch in text):
            raise InvalidCommandError(f"bad command word string {text!r}")
        return cls(int(text[0]), tuple(int(ch) for ch in text[1:]))


@dataclass(frozen=True)
class Program:
    """An ordered instruction sequence over a fixed register size.

    List order is application order: the first instruction acts first.
    """

    num_qubits: int
    instructions: tuple

    def __post_init__(self):
        object.__setattr__(self, "instructions", tuple(self.instructions))
        for instr in self.instructions:
            bad = [i for i in instr.qubits if not 1 <= i <= self.num_qubits]
            if bad:
                raise InvalidCommandError(
                    f"instruction targets {bad} outside 1..{self.num_qubits}"
                )


def encode(instr: Instruction, num_qubits: int):
    """Instruction -> ``(CommandWord, AngleState | None)``.

    A coupling also yields the angle state carrying its angle; the NOT
    layer needs none.
    """
    bits = tuple(1 if i + 1 in instr.qubits else 0 for i in range(num_qubits))
    if isinstance(instr, Coupling):
        return CommandWord(0, bits), make_angle_state(instr.theta)
    return CommandWord(1, bits), None


def decode(word: CommandWord):
    """Inverse of :func:`encode` up to the angle, which lives elsewhere."""
    if word.c0 == 0:
        return CouplingSkeleton(word.subset())
    return NotGates(word.subset())


def _not_mask(qubits: frozenset, num_qubits: int) -> int:
    mask = 0
    for i in qubits:
        mask |= 1 << (num_qubits - i)
    return mask


def apply_not_gates(qubits: frozenset, data: StateVector) -> StateVector:
    """Flip the selected qubits: a pure index permutation of the amplitudes."""
    mask = _not_mask(qubits, data.num_qubits)
    idx = np.arange(data.dim) ^ mask
    return StateVector(data.amps[idx])


def execute_command(
    word: CommandWord,
    angle: AngleState | None,
    data: StateVector,
    rng: RandomStream,
) -> RetrievalOutcome:
    """Run the general gate array for one command word.

    Couplings run a measured retrieval step with the subset generator
    (the controlled coupling factorizes into per-qubit controlled-
    ``sigma_z``, so one word drives the whole chain); the NOT layer applies
    deterministically and always reports success.
    """
    if word.num_qubits != data.num_qubits:
        raise InvalidCommandError(
            f"word is for {word.num_qubits} qubits, data has {data.num_qubits}"
        )
    decoded = decode(word)
    if isinstance(decoded, CouplingSkeleton):
        if angle is None:
            raise InvalidCommandError("coupling command requires an angle state")
        generator = PauliZSubset(data.num_qubits, decoded.qubits)
        return retrieval_step(angle, generator, data, rng)
    if angle is not None:
        raise InvalidCommandError("NOT-layer command must not carry an angle state")
    post = apply_not_gates(decoded.qubits, data)
    return RetrievalOutcome(success=True, measured_bit=0, post_data=post, attempt_angle=None)


def coupling_chain_equivalence(
    num_qubits: int, subset: frozenset, tol: float = 1e-12
) -> bool:
    """Check that per-qubit controlled-Z gates compose to the subset coupling.

    Builds the product of two-qubit controlled-``sigma_z`` gates (control =
    carrier qubit, one target per subset member) and compares it entrywise
    to ``controlled(PauliZSubset(n, subset))``.
    """
    subset = frozenset(int(i) for i in subset)
    generator = PauliZSubset(num_qubits, subset)
    p0 = np.diag([1.0, 0.0]).astype(np.complex128)
    p1 = np.diag([0.0, 1.0]).astype(np.complex128)
    chain = np.eye(1 << (num_qubits + 1), dtype=np.complex128)
    for i in sorted(subset):
        factors_z = [PAULI_Z if j == i else IDENTITY_2 for j in range(1, num_qubits + 1)]
        z_on_i = factors_z[0]
        for f in factors_z[1:]:
            z_on_i = kron(z_on_i, f)
        cz = kron(p0, np.eye(1 << num_qubits, dtype=np.complex128)) + kron(p1, z_on_i)
        chain = cz @ chain
    return bool(np.max(np.abs(chain - controlled(generator))) <= tol)


def generator_count(num_qubits: int) -> int:
    """Number of distinct coupling generators: one per nonempty subset."""
    if not 1 <= num_qubits <= 20:
        raise ValueError("qubit count out of range 1..20")
    return (1 << num_qubits) - 1


def instruction_unitary(instr: Instruction, num_qubits: int) -> np.ndarray:
    if isinstance(instr, Coupling):
        return rotation(PauliZSubset(num_qubits, instr.qubits), instr.theta)
    factors = [
        PAULI_X if i + 1 in instr.qubits else IDENTITY_2 for i in range(num_qubits)
    ]
    out = factors[0]
    for f in factors[1:]:
        out = kron(out, f)
    return out


def compose_program_unitary(program: Program) -> np.ndarray:
    """Dense product of the program's instructions, first instruction first."""
    total = np.eye(1 << program.num_qubits, dtype=np.complex128)
    for instr in program.instructions:
        total = instruction_unitary(instr, program.num_qubits) @ total
    return total


def parse_program(text: str, num_qubits: int | None = None) -> Program:
    """Parse the one-instruction-per-line program format.

    ``J <i,j,...> <theta>`` is a coupling, ``X <i,j,...>`` the NOT layer;
    blank lines and ``#`` comments are skipped.  The register size defaults
    to the largest qubit index mentioned.
    """
    instructions = []
    max_index = 1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            qubits = frozenset(int(tok) for tok in parts[1].split(","))
        except (IndexError, ValueError):
            raise InvalidCommandError(f"line {lineno}: bad qubit list in {raw!r}") from None
        if parts[0] == "J":
            if len(parts) != 3:
                raise InvalidCommandError(f"line {lineno}: want 'J <qubits> <theta>'")
            try:
                theta = float(parts[2])
            except ValueError:
                raise InvalidCommandError(f"line {lineno}: bad angle {parts[2]!r}") from None
            if not math.isfinite(theta):
                raise InvalidCommandError(f"line {lineno}: angle must be finite")
            instructions.append(Coupling(qubits, theta))
        elif parts[0] == "X":
            if len(parts) != 2:
                raise InvalidCommandError(f"line {lineno}: want 'X <qubits>'")
            instructions.append(NotGates(qubits))
        else:
            raise InvalidCommandError(f"line {lineno}: unknown instruction {parts[0]!r}")
        max_index = max(max_index, max(qubits))
    return Program(num_qubits if num_qubits is not None else max_index, instructions)


def format_program(program: Program) -> str:
    """Inverse of :func:`parse_program`."""
    lines = []
    for instr in program.instructions:
        qubits = ",".join(str(i) for i in sorted(instr.qubits))
        if isinstance(instr, Coupling):
            lines.append(f"J {qubits} {instr.theta!r}")
        else:
            lines.append(f"X {qubits}")
    return "\n".join(lines) + ("\n" if lines else "")
