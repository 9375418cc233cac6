"""Self-check suite: every structural claim the simulator rests on.

Each check is a pure function returning a :class:`CheckResult`; the CLI
``verify`` subcommand runs them all and reports per-check JSON.  The checks
are deliberately redundant with the unit tests -- they are the runtime
counterpart a user can execute against an installed build.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .commands import CommandWord, coupling_chain_equivalence, decode, encode, generator_count
from .commands import Coupling, NotGates
from .generators import (
    PauliZSubset,
    PhaseShift,
    phase_shift_equivalence,
    random_self_inverse,
    rotation,
)
from .retrieval import (
    make_angle_state,
    retrieval_branches,
    retrieve_with_correction,
    verify_decomposition,
)
from .rng import RandomStream


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


class _AlwaysFail:
    """Uniform source pinned just under 1: every measurement picks branch 1."""

    def uniform(self) -> float:
        return 1.0 - 1e-12


def _random_generator(num_qubits: int, rng: RandomStream, which: int):
    kind = which % 3
    if kind == 0:
        subset = frozenset(
            i for i in range(1, num_qubits + 1) if rng.uniform() < 0.5
        ) or frozenset({1 + int(rng.uniform() * num_qubits) % num_qubits})
        return PauliZSubset(num_qubits, subset)
    if kind == 1:
        return PhaseShift(num_qubits)
    return random_self_inverse(min(num_qubits, 3), rng)


def check_exact_branch_probability(
    max_qubits: int = 5, cases: int = 100, seed: int = 20240, tol: float = 1e-12
) -> CheckResult:
    """Branch weights are 1/2 each, amplitude-level, for random configurations."""
    root = RandomStream(seed)
    worst = 0.0
    for case in range(cases):
        rng = root.substream(case)
        n = 1 + int(rng.uniform() * max_qubits) % max_qubits
        generator = _random_generator(n, rng, case)
        data = linalg.random_state(generator.num_qubits, rng)
        theta = (rng.uniform() - 0.5) * 8 * math.pi
        branches = retrieval_branches(make_angle_state(theta), generator, data)
        worst = max(worst, abs(branches.weight0 - 0.5), abs(branches.weight1 - 0.5))
    return CheckResult(
        "exact-branch-probability",
        worst <= tol,
        f"max |weight - 1/2| = {worst:.3e} over {cases} cases (tol {tol})",
    )


def check_correction_algebra(
    max_failures: int = 10, seed: int = 20241, tol: float = 1e-9
) -> CheckResult:
    """k straight failures leave the register at angle -(2**k - 1)*theta."""
    rng = RandomStream(seed)
    worst = 1.0
    for k in range(1, max_failures + 1):
        theta = (rng.uniform() - 0.5) * 4 * math.pi
        generator = PauliZSubset(3, frozenset({1, 3}))
        data = linalg.random_state(3, rng)
        result = retrieve_with_correction(
            theta, generator, data, _AlwaysFail(), max_attempts=k
        )
        expected = linalg.apply(rotation(generator, -((1 << k) - 1) * theta), data)
        worst = min(worst, linalg.fidelity_up_to_phase(result.state, expected))
        if result.succeeded or result.attempts != k:
            return CheckResult(
                "correction-algebra", False, f"forced-failure run did not fail {k} times"
            )
    return CheckResult(
        "correction-algebra",
        worst >= 1.0 - tol,
        f"min residual fidelity = {worst:.12f} over k = 1..{max_failures} (tol {tol})",
    )


def check_coupling_chain(max_qubits: int = 5, tol: float = 1e-12) -> CheckResult:
    """Per-qubit controlled-Z chains match the subset coupling, exhaustively."""
    checked = 0
    for n in range(1, max_qubits + 1):
        for bits in range(1, 1 << n):
            subset = frozenset(i + 1 for i in range(n) if bits & (1 << i))
            if not coupling_chain_equivalence(n, subset, tol):
                return CheckResult(
                    "coupling-chain-equivalence", False, f"mismatch at n={n}, subset={sorted(subset)}"
                )
            checked += 1
    return CheckResult(
        "coupling-chain-equivalence",
        True,
        f"{checked} subset/size combinations up to n={max_qubits} (tol {tol})",
    )


def check_phase_shift(
    max_qubits: int = 4, thetas_per_size: int = 20, seed: int = 20242, tol: float = 1e-10
) -> CheckResult:
    """The diagonal generator reproduces the phase-shift gate up to phase."""
    rng = RandomStream(seed)
    for n in range(1, max_qubits + 1):
        b = PhaseShift(n).matrix()
        if not linalg.is_self_inverse(b, tol):
            return CheckResult("phase-shift-gate", False, f"generator not self-inverse at n={n}")
        for _ in range(thetas_per_size):
            theta = (rng.uniform() - 0.5) * 8 * math.pi
            if not phase_shift_equivalence(n, theta, tol):
                return CheckResult(
                    "phase-shift-gate", False, f"gate mismatch at n={n}, theta={theta}"
                )
    return CheckResult(
        "phase-shift-gate",
        True,
        f"n=1..{max_qubits}, {thetas_per_size} angles each (tol {tol})",
    )


def check_codec_roundtrip(max_qubits: int = 8) -> CheckResult:
    """encode/decode is the identity on every valid word's skeleton."""
    words = 0
    for n in range(1, max_qubits + 1):
        for bits in range(1, 1 << n):
            subset = frozenset(i + 1 for i in range(n) if bits & (1 << (n - i - 1)))
            for instr in (Coupling(subset, 0.5), NotGates(subset)):
                word, carrier = encode(instr, n)
                if (carrier is not None) != isinstance(instr, Coupling):
                    return CheckResult("codec-roundtrip", False, "angle presence mismatch")
                skeleton = decode(word)
                if skeleton.qubits != subset:
                    return CheckResult(
                        "codec-roundtrip", False, f"subset mismatch at n={n}: {word.as_string()}"
                    )
                again = CommandWord.from_string(word.as_string())
                if again != word:
                    return CheckResult("codec-roundtrip", False, "string serialization mismatch")
                words += 1
    return CheckResult("codec-roundtrip", True, f"{words} words round-tripped up to n={max_qubits}")


def check_generator_count(max_qubits: int = 8) -> CheckResult:
    """The formula 2**n - 1 matches exhaustive enumeration of coupling words."""
    for n in range(1, max_qubits + 1):
        distinct = set()
        for bits in range(1, 1 << n):
            subset = frozenset(i + 1 for i in range(n) if bits & (1 << i))
            word, _ = encode(Coupling(subset, 1.0), n)
            distinct.add(word.as_string())
        if len(distinct) != generator_count(n):
            return CheckResult(
                "generator-count", False, f"enumerated {len(distinct)} != {generator_count(n)} at n={n}"
            )
    return CheckResult("generator-count", True, f"matches enumeration for n=1..{max_qubits}")


def check_decomposition(
    cases: int = 50, seed: int = 20243, tol: float = 1e-12, u_builder=rotation
) -> CheckResult:
    """The stored operator decomposes onto identity/generator at exactly 1/2 weight."""
    root = RandomStream(seed)
    for case in range(cases):
        rng = root.substream(case)
        n = 1 + case % 3
        generator = _random_generator(n, rng, case)
        theta = (rng.uniform() - 0.5) * 8 * math.pi
        if not verify_decomposition(
            generator, theta, seed=seed + case, tol=tol, u_builder=u_builder
        ):
            return CheckResult(
                "storage-decomposition", False, f"case {case} failed (theta={theta})"
            )
    return CheckResult("storage-decomposition", True, f"{cases} random cases (tol {tol})")


def run_all(max_qubits: int = 5, seed: int = 2024) -> list:
    """Every check at its contract tolerance; order is stable for reports."""
    return [
        check_exact_branch_probability(min(max_qubits, 5), seed=seed),
        check_correction_algebra(seed=seed + 1),
        check_coupling_chain(min(max_qubits, 5)),
        check_phase_shift(min(max_qubits, 4), seed=seed + 2),
        check_codec_roundtrip(max(max_qubits, 8)),
        check_generator_count(max(max_qubits, 8)),
        check_decomposition(seed=seed + 3),
    ]
