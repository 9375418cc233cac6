"""Probabilistic storage and two-party transfer of unitary operators.

Any unitary whose generator is self-inverse (Hermitian with B @ B == I)
splits into ``cos(theta/2)*I - i*sin(theta/2)*B``; the pair of coefficients
fits in one qubit, the *angle state*.  This package simulates the storage,
the measuring gate array that retrieves the operator with per-shot success
probability exactly 1/2, the doubled-angle correction loop that repairs
failures at an expected cost of two angle states, the classical command
words that select which generator the array applies, and the interactive
protocol that transfers a whole instruction sequence to a remote register.

Hot loops run on a compiled kernel when available (``qps._kernels.BACKEND``
says which implementation is active).
"""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .commands import (
    CommandWord,
    Coupling,
    CouplingSkeleton,
    InvalidCommandError,
    Instruction,
    NotGates,
    Program,
    compose_program_unitary,
    coupling_chain_equivalence,
    decode,
    encode,
    execute_command,
    format_program,
    generator_count,
    parse_program,
)
from .generators import (
    DenseGenerator,
    Generator,
    PauliZSubset,
    PhaseShift,
    controlled,
    parse_generator,
    phase_shift_equivalence,
    random_self_inverse,
    rotation,
)
from .linalg import (
    DimensionMismatchError,
    NotUnitaryError,
    StateVector,
    apply,
    fidelity_up_to_phase,
    is_self_inverse,
    kron,
    random_state,
)
from .protocol import (
    AliceSession,
    AngleQubit,
    BobSession,
    Command,
    ErrorMessage,
    ProgramBegin,
    ProgramEnd,
    ProtocolViolation,
    Result,
    SessionResult,
    run_session,
)
from .retrieval import (
    AngleState,
    Branches,
    CorrectionResult,
    RetrievalOutcome,
    TrialStats,
    angle_state_from_amplitudes,
    make_angle_state,
    monte_carlo,
    retrieval_branches,
    retrieval_step,
    retrieve_with_correction,
    verify_decomposition,
)
from .rng import RandomStream
from .transport import TransportError

__all__ = [
    "BACKEND",
    "AliceSession",
    "AngleQubit",
    "AngleState",
    "BobSession",
    "Branches",
    "Command",
    "CommandWord",
    "CorrectionResult",
    "Coupling",
    "CouplingSkeleton",
    "DenseGenerator",
    "DimensionMismatchError",
    "ErrorMessage",
    "Generator",
    "Instruction",
    "InvalidCommandError",
    "NotGates",
    "NotUnitaryError",
    "PauliZSubset",
    "PhaseShift",
    "Program",
    "ProgramBegin",
    "ProgramEnd",
    "ProtocolViolation",
    "RandomStream",
    "Result",
    "RetrievalOutcome",
    "SessionResult",
    "StateVector",
    "TransportError",
    "TrialStats",
    "apply",
    "angle_state_from_amplitudes",
    "compose_program_unitary",
    "controlled",
    "coupling_chain_equivalence",
    "decode",
    "encode",
    "execute_command",
    "fidelity_up_to_phase",
    "format_program",
    "generator_count",
    "is_self_inverse",
    "kron",
    "make_angle_state",
    "monte_carlo",
    "parse_generator",
    "parse_program",
    "phase_shift_equivalence",
    "random_self_inverse",
    "random_state",
    "retrieval_branches",
    "retrieval_step",
    "retrieve_with_correction",
    "rotation",
    "run_session",
    "verify_decomposition",
]
