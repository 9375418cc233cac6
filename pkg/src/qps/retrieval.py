"""Storing an angle in one qubit and retrieving the operator it encodes.

The carrier is a single-qubit *angle state*

    |theta> = cos(theta/2)|0> - i sin(theta/2)|1>,

whose two amplitudes are exactly the coefficients of identity and generator
in ``rotation(g, theta) = cos(theta/2)*I - i*sin(theta/2)*B``.  The
retrieving array applies controlled-B from the carrier onto the data
register, a Hadamard on the carrier, and measures the carrier: outcome 0
leaves ``rotation(g, theta) @ d`` and outcome 1 leaves
``rotation(g, -theta) @ d``, each with probability exactly 1/2.

A failure is repaired by retrying with the doubled angle: after ``k``
straight failures the register holds ``rotation(g, -(2**k - 1)*theta) @ d``,
one success at any stage lands the target, and the expected number of
carrier states consumed is 2.  No single-qubit storage scheme can beat the
1/2 per-shot success probability, so the loop is as good as it gets.

Measurement destroys the carrier: an :class:`AngleState` is consumed by
:func:`retrieval_step` and cannot be used twice.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels, linalg
from .generators import Generator, rotation
from .linalg import DimensionMismatchError, StateVector
from .rng import RandomStream

DEFAULT_MAX_ATTEMPTS = 64  # the loop is unbounded in principle; a harness is not


class AngleState:
    """Single-qubit carrier of an angle, single-use.

    ``theta`` is bookkeeping for the storing side and for tests; the
    retrieving side of a transfer only ever sees the amplitudes (build those
    with :func:`angle_state_from_amplitudes`, which leaves ``theta`` None).
    """

    __slots__ = ("theta", "state", "_consumed")

    def __init__(self, state: StateVector, theta: float | None):
        if state.num_qubits != 1:
            raise ValueError("an angle state is a single qubit")
        self.state = state
        self.theta = theta
        self._consumed = False

    @property
    def consumed(self) -> bool:
        return self._consumed

    def _take(self) -> np.ndarray:
        if self._consumed:
            raise ValueError("angle state already consumed by a measurement")
        self._consumed = True
        return self.state.amps

    def __repr__(self) -> str:
        tag = "consumed" if self._consumed else "fresh"
        return f"AngleState(theta={self.theta}, {tag})"


def make_angle_state(theta: float) -> AngleState:
    """Encode ``theta`` into its carrier: ``cos(theta/2)|0> - i sin(theta/2)|1>``."""
    if not math.isfinite(theta):
        raise ValueError("theta must be finite")
    amps = np.array(
        [math.cos(theta / 2), -1j * math.sin(theta / 2)], dtype=np.complex128
    )
    return AngleState(StateVector(amps), theta)


def angle_state_from_amplitudes(
    amp0: complex, amp1: complex, tol: float = 1e-9
) -> AngleState:
    """Rebuild a carrier from received amplitudes; the angle stays unknown."""
    arr = np.array([amp0, amp1], dtype=np.complex128)
    norm = float(np.linalg.norm(arr))
    if abs(norm - 1.0) > tol:
        raise ValueError(f"carrier amplitudes not normalized: |amps| = {norm!r}")
    return AngleState(StateVector(arr / norm), None)


@dataclass(frozen=True)
class RetrievalOutcome:
    """Result of one measured gate-array step.

    ``success`` iff ``measured_bit == 0``.  A deterministic NOT-layer
    execution reports success with ``measured_bit == 0`` and no angle.
    """

    success: bool
    measured_bit: int
    post_data: StateVector
    attempt_angle: float | None


@dataclass(frozen=True)
class CorrectionResult:
    """Outcome of the repeat-until-success loop.

    ``succeeded`` is False only when ``max_attempts`` ran out, in which case
    ``state`` is the residual ``rotation(g, -(2**attempts - 1)*theta) @ d``.
    """

    state: StateVector
    attempts: int
    succeeded: bool


class Branches(NamedTuple):
    """Both measurement branches of one step, with their exact weights."""

    state0: StateVector
    state1: StateVector
    weight0: float
    weight1: float


def _check_dims(generator: Generator, data: StateVector) -> None:
    if generator.num_qubits != data.num_qubits:
        raise DimensionMismatchError(
            f"generator acts on {generator.num_qubits} qubits, data has {data.num_qubits}"
        )


def retrieval_branches(
    angle: AngleState, generator: Generator, data: StateVector
) -> Branches:
    """Amplitude-level view of one step: both collapsed branches and weights.

    Applies controlled-B then the carrier Hadamard to the joint state and
    splits on the carrier bit.  Does not consume the angle state and does
    not sample.  For a valid angle state both weights are exactly 1/2 (up
    to float rounding) regardless of generator, angle, or data.
    """
    _check_dims(generator, data)
    a0, a1 = angle.state.amps
    d = data.amps
    w = generator.matrix() @ d
    # joint after controlled-B: (a0*d, a1*w); Hadamard mixes the halves
    top = (a0 * d + a1 * w) / math.sqrt(2)
    bot = (a0 * d - a1 * w) / math.sqrt(2)
    w0 = float(np.vdot(top, top).real)
    w1 = float(np.vdot(bot, bot).real)
    if w0 == 0.0 or w1 == 0.0:
        # only reachable with a carrier not of the cos/-i*sin form
        raise ValueError("degenerate carrier: a measurement branch has zero weight")
    return Branches(
        StateVector(top / math.sqrt(w0)),
        StateVector(bot / math.sqrt(w1)),
        w0,
        w1,
    )


def retrieval_step(
    angle: AngleState, generator: Generator, data: StateVector, rng: RandomStream
) -> RetrievalOutcome:
    """Run one gate-array step and measure the carrier.

    Consumes the angle state.  Outcome 0 collapses the register onto
    ``rotation(g, theta) @ data``, outcome 1 onto ``rotation(g, -theta) @
    data``, sampled at the computed branch weights.
    """
    _check_dims(generator, data)
    a0, a1 = angle._take()
    work = data.amps.copy()
    u = rng.uniform()
    diag = generator.diagonal()
    if diag is not None:
        bit, _ = _kernels.step_diag(a0, a1, diag, work, u)
    else:
        bit, _ = _kernels.step_dense(a0, a1, generator.matrix(), work, u)
    return RetrievalOutcome(
        success=(bit == 0),
        measured_bit=bit,
        post_data=StateVector(work),
        attempt_angle=angle.theta,
    )


def retrieve_with_correction(
    theta: float,
    generator: Generator,
    data: StateVector,
    rng: RandomStream,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
) -> CorrectionResult:
    """Repeat-until-success retrieval of ``rotation(g, theta)``.

    Attempt ``m`` (1-based) spends a fresh angle state for ``2**(m-1) *
    theta``; a success leaves ``rotation(g, theta) @ data`` up to global
    phase no matter how many failures preceded it.  Exhaustion is a
    reported outcome, not an exception.
    """
    if max_attempts < 1:
        raise ValueError("max_attempts must be at least 1")
    state = data
    for m in range(1, max_attempts + 1):
        carrier = make_angle_state(math.ldexp(theta, m - 1))
        outcome = retrieval_step(carrier, generator, state, rng)
        state = outcome.post_data
        if outcome.success:
            return CorrectionResult(state, m, True)
    return CorrectionResult(state, max_attempts, False)


def verify_decomposition(
    generator: Generator,
    theta: float,
    probe_states: int = 3,
    seed: int = 0,
    tol: float = 1e-12,
    u_builder=rotation,
) -> bool:
    """Check the storage decomposition and the 1/2-1/2 branch weights.

    Confirms entrywise (within ``tol``) that the generated unitary equals
    ``cos(theta/2)*I - i*sin(theta/2)*B`` -- the exact pair of coefficients
    an angle state carries, computed here independently through the
    eigendecomposition route -- and that both measurement branches weigh
    1/2 (within ``tol``) on ``probe_states`` random data states.  The 1/2
    is the provable ceiling for single-qubit storage, so equality here
    means the scheme attains it.
    """
    b = generator.matrix()
    u = u_builder(generator, theta)
    expected = linalg.exponentiate_hermitian(b, theta)
    if float(np.max(np.abs(u - expected))) > tol:
        return False
    rng = RandomStream(seed)
    angle = make_angle_state(theta)
    for i in range(probe_states):
        data = linalg.random_state(generator.num_qubits, rng.substream(i))
        branches = retrieval_branches(angle, generator, data)
        if abs(branches.weight0 - 0.5) > tol or abs(branches.weight1 - 0.5) > tol:
            return False
    return True


@dataclass(frozen=True)
class TrialStats:
    """Aggregates of a seeded retrieval campaign.

    ``successes`` counts first-attempt successes (the per-shot coin);
    ``attempts_histogram`` maps total angle states consumed to frequency.
    A trial that exhausts ``max_attempts`` (never at default settings)
    lands in the top histogram bucket.
    """

    rng_seed: int
    trials: int
    successes: int
    mean_attempts: float
    attempts_histogram: dict

    def as_dict(self) -> dict:
        return {
            "seed": self.rng_seed,
            "trials": self.trials,
            "successes": self.successes,
            "mean_attempts": self.mean_attempts,
            "histogram": {str(k): v for k, v in sorted(self.attempts_histogram.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2)


def monte_carlo(
    generator: Generator,
    theta: float,
    data: StateVector,
    trials: int,
    seed: int,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
) -> TrialStats:
    """Run ``trials`` independent correction loops and tally the attempts.

    Trial ``t`` draws from substream ``t`` of ``RandomStream(seed)``, so the
    result is reproducible and independent of execution order; the batch is
    identical to looping :func:`retrieve_with_correction` over substreams.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    _check_dims(generator, data)
    root = RandomStream(seed)
    diag = generator.diagonal()
    if diag is not None:
        attempts, succeeded = _kernels.correction_attempts_diag(
            theta, diag, data.amps, root.key, trials, max_attempts
        )
    else:
        attempts, succeeded = _kernels.correction_attempts_dense(
            theta, generator.matrix(), data.amps, root.key, trials, max_attempts
        )
    first_try = int(np.count_nonzero((attempts == 1) & (succeeded == 1)))
    counts = np.bincount(attempts)
    histogram = {int(m): int(c) for m, c in enumerate(counts) if c > 0}
    return TrialStats(
        rng_seed=seed,
        trials=trials,
        successes=first_try,
        mean_attempts=float(np.mean(attempts)),
        attempts_histogram=histogram,
    )
