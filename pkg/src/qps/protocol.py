"""Interactive two-party transfer of an operator program.

The sender (Alice) walks her instruction sequence; for each instruction she
ships a command word, plus an angle state when the instruction carries an
angle.  The receiver (Bob) runs the general gate array and reports the
measurement result.  On failure Alice ships a fresh angle state for the
doubled angle -- the command stays in force -- and on success she moves to
the next instruction, until the whole sequence has been applied to Bob's
register.

The "quantum channel" here is two complex amplitudes in a JSON message.
That deliberately gives up the physics that makes real angle states
uncopyable; what this module enforces instead is the protocol-level
contract: every angle message is consumed by exactly one measurement,
replays are rejected by phase checking, and Bob never learns the angle
itself -- only his own measurement outcomes.  Wire format: 4-byte
big-endian length, then a UTF-8 JSON object with a ``type`` field.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Optional, Union

from .commands import (
    CommandWord,
    Coupling,
    CouplingSkeleton,
    InvalidCommandError,
    Program,
    decode,
    encode,
    execute_command,
)
from .linalg import StateVector
from .retrieval import angle_state_from_amplitudes, make_angle_state
from .rng import RandomStream
from .transport import loopback_pair

DEFAULT_MAX_RETRIES = 64


class ProtocolViolation(RuntimeError):
    """A message arrived that the session state machine cannot accept."""


@dataclass(frozen=True)
class ProgramBegin:
    num_qubits: int


@dataclass(frozen=True)
class Command:
    word: CommandWord


@dataclass(frozen=True)
class AngleQubit:
    amp0: complex
    amp1: complex


@dataclass(frozen=True)
class Result:
    success: bool


@dataclass(frozen=True)
class ProgramEnd:
    pass


@dataclass(frozen=True)
class ErrorMessage:
    code: str
    detail: str


Message = Union[ProgramBegin, Command, AngleQubit, Result, ProgramEnd, ErrorMessage]


def encode_message(msg: Message) -> bytes:
    if isinstance(msg, ProgramBegin):
        obj = {"type": "begin", "n": msg.num_qubits}
    elif isinstance(msg, Command):
        obj = {
            "type": "command",
            "c0": msg.word.c0,
            "c": "".join(str(b) for b in msg.word.bits),
        }
    elif isinstance(msg, AngleQubit):
        obj = {
            "type": "angle",
            "re0": msg.amp0.real,
            "im0": msg.amp0.imag,
            "re1": msg.amp1.real,
            "im1": msg.amp1.imag,
        }
    elif isinstance(msg, Result):
        obj = {"type": "result", "success": msg.success}
    elif isinstance(msg, ProgramEnd):
        obj = {"type": "end"}
    elif isinstance(msg, ErrorMessage):
        obj = {"type": "error", "code": msg.code, "detail": msg.detail}
    else:
        raise TypeError(f"not a protocol message: {msg!r}")
    return json.dumps(obj, separators=(",", ":")).encode("utf-8")


def _field(obj: dict, key: str, kind) -> object:
    if key not in obj:
        raise ProtocolViolation(f"message lacks field {key!r}")
    value = obj[key]
    if kind is float and isinstance(value, int):
        value = float(value)
    if not isinstance(value, kind) or (kind is int and isinstance(value, bool)):
        raise ProtocolViolation(f"field {key!r} has the wrong type")
    if kind is float and not math.isfinite(value):
        raise ProtocolViolation(f"field {key!r} is not finite")
    return value


def decode_message(payload: bytes) -> Message:
    """Parse one wire message; anything malformed raises ProtocolViolation."""
    try:
        obj = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ProtocolViolation(f"undecodable message: {exc}") from exc
    if not isinstance(obj, dict):
        raise ProtocolViolation("message is not a JSON object")
    kind = obj.get("type")
    if kind == "begin":
        return ProgramBegin(_field(obj, "n", int))
    if kind == "command":
        bits = _field(obj, "c", str)
        try:
            return Command(CommandWord.from_string(str(_field(obj, "c0", int)) + bits))
        except InvalidCommandError as exc:
            raise ProtocolViolation(f"invalid command word: {exc}") from exc
    if kind == "angle":
        return AngleQubit(
            complex(_field(obj, "re0", float), _field(obj, "im0", float)),
            complex(_field(obj, "re1", float), _field(obj, "im1", float)),
        )
    if kind == "result":
        return Result(_field(obj, "success", bool))
    if kind == "end":
        return ProgramEnd()
    if kind == "error":
        return ErrorMessage(_field(obj, "code", str), _field(obj, "detail", str))
    raise ProtocolViolation(f"unknown message type {kind!r}")


class AliceSession:
    """Sender side: streams instructions, doubles the angle after failures."""

    def __init__(self, program: Program, max_retries: int = DEFAULT_MAX_RETRIES):
        self._program = program
        self._cursor = 0
        self._failures = 0
        self._started = False
        self._done = False
        self._max_retries = max_retries

    @property
    def done(self) -> bool:
        return self._done

    @property
    def pending_theta(self) -> Optional[float]:
        """Angle the next carrier for the current instruction will hold."""
        if self._done or self._cursor >= len(self._program.instructions):
            return None
        instr = self._program.instructions[self._cursor]
        if not isinstance(instr, Coupling):
            return None
        return math.ldexp(instr.theta, self._failures)

    def _instruction_batch(self) -> list:
        instr = self._program.instructions[self._cursor]
        word, carrier = encode(instr, self._program.num_qubits)
        batch: list = [Command(word)]
        if carrier is not None:
            amps = carrier.state.amps
            batch.append(AngleQubit(complex(amps[0]), complex(amps[1])))
        return batch

    def next_messages(self, feedback: Optional[Result]) -> list:
        """Messages to send next, given the result of the previous attempt.

        Pass ``feedback=None`` only on the first call.  After the returned
        batch ends with :class:`ProgramEnd` the session is done and no
        feedback is expected.
        """
        if self._done:
            raise ProtocolViolation("session already finished")
        if not self._started:
            if feedback is not None:
                raise ProtocolViolation("feedback before anything was sent")
            self._started = True
            batch = [ProgramBegin(self._program.num_qubits)]
            if not self._program.instructions:
                self._done = True
                return batch + [ProgramEnd()]
            return batch + self._instruction_batch()

        if feedback is None:
            raise ProtocolViolation("an attempt is in flight; feedback required")
        instr = self._program.instructions[self._cursor]
        if feedback.success:
            self._cursor += 1
            self._failures = 0
            if self._cursor >= len(self._program.instructions):
                self._done = True
                return [ProgramEnd()]
            return self._instruction_batch()

        if not isinstance(instr, Coupling):
            raise ProtocolViolation("the deterministic NOT layer cannot fail")
        self._failures += 1
        if self._failures > self._max_retries:
            raise ProtocolViolation(
                f"instruction {self._cursor} still failing after {self._max_retries} retries"
            )
        theta = math.ldexp(instr.theta, self._failures)
        amps = make_angle_state(theta).state.amps
        return [AngleQubit(complex(amps[0]), complex(amps[1]))]


class Phase(enum.Enum):
    AWAIT_BEGIN = "await_begin"
    AWAIT_COMMAND = "await_command"
    AWAIT_ANGLE = "await_angle"
    EXECUTING = "executing"
    DONE = "done"


class BobSession:
    """Receiver side: executes the gate array, reports outcomes.

    An out-of-phase or malformed message produces an :class:`ErrorMessage`
    reply and aborts the session; any further message raises.
    """

    def __init__(self, data: StateVector, rng: RandomStream):
        self._data = data
        self._rng = rng
        self._phase = Phase.AWAIT_BEGIN
        self._pending: Optional[CouplingSkeleton] = None
        self._aborted = False

    @property
    def data(self) -> StateVector:
        return self._data

    @property
    def phase(self) -> Phase:
        return self._phase

    def _abort(self, code: str, detail: str) -> ErrorMessage:
        self._aborted = True
        self._phase = Phase.DONE
        return ErrorMessage(code, detail)

    def handle(self, msg: Message) -> Optional[Message]:
        """Process one message; the return value, if any, must be sent back."""
        if self._aborted:
            raise ProtocolViolation("session aborted")
        if isinstance(msg, ErrorMessage):
            self._aborted = True
            raise ProtocolViolation(f"peer error {msg.code}: {msg.detail}")

        if self._phase is Phase.AWAIT_BEGIN:
            if not isinstance(msg, ProgramBegin):
                return self._abort("out-of-phase", f"expected begin, got {type(msg).__name__}")
            if msg.num_qubits != self._data.num_qubits:
                return self._abort(
                    "begin-mismatch",
                    f"program is for {msg.num_qubits} qubits, register has {self._data.num_qubits}",
                )
            self._phase = Phase.AWAIT_COMMAND
            return None

        if self._phase is Phase.AWAIT_COMMAND:
            if isinstance(msg, ProgramEnd):
                self._phase = Phase.DONE
                return None
            if not isinstance(msg, Command):
                return self._abort("out-of-phase", f"expected command, got {type(msg).__name__}")
            if msg.word.num_qubits != self._data.num_qubits:
                return self._abort("invalid-command", "word length does not match register")
            decoded = decode(msg.word)
            if isinstance(decoded, CouplingSkeleton):
                self._pending = decoded
                self._phase = Phase.AWAIT_ANGLE
                return None
            self._phase = Phase.EXECUTING
            outcome = execute_command(msg.word, None, self._data, self._rng)
            self._data = outcome.post_data
            self._phase = Phase.AWAIT_COMMAND
            return Result(True)

        if self._phase is Phase.AWAIT_ANGLE:
            if not isinstance(msg, AngleQubit):
                return self._abort("out-of-phase", f"expected angle state, got {type(msg).__name__}")
            try:
                carrier = angle_state_from_amplitudes(msg.amp0, msg.amp1)
            except ValueError as exc:
                return self._abort("bad-angle-state", str(exc))
            self._phase = Phase.EXECUTING
            word = CommandWord(
                0,
                tuple(
                    1 if i + 1 in self._pending.qubits else 0
                    for i in range(self._data.num_qubits)
                ),
            )
            outcome = execute_command(word, carrier, self._data, self._rng)
            self._data = outcome.post_data
            if outcome.success:
                self._pending = None
                self._phase = Phase.AWAIT_COMMAND
            else:
                self._phase = Phase.AWAIT_ANGLE  # same command stays in force
            return Result(outcome.success)

        return self._abort("out-of-phase", "message after session end")


@dataclass(frozen=True)
class SessionResult:
    """Completed transfer: Bob's final register, full message log, angle cost."""

    final_state: StateVector
    transcript: tuple
    angle_states_sent: int


def drive_alice(stream, program: Program, max_retries: int = DEFAULT_MAX_RETRIES,
                transcript: Optional[list] = None):
    """Run the sender side of a session over a framed transport.

    Returns the number of angle states sent.  The transcript list, if
    given, collects ``(direction, message)`` pairs in wire order.
    """
    alice = AliceSession(program, max_retries=max_retries)
    feedback: Optional[Result] = None
    angle_count = 0
    while not alice.done:
        for msg in alice.next_messages(feedback):
            stream.send_frame(encode_message(msg))
            if transcript is not None:
                transcript.append(("alice->bob", msg))
            if isinstance(msg, AngleQubit):
                angle_count += 1
        if alice.done:
            break
        got = decode_message(stream.recv_frame())
        if transcript is not None:
            transcript.append(("bob->alice", got))
        if isinstance(got, ErrorMessage):
            raise ProtocolViolation(f"peer error {got.code}: {got.detail}")
        if not isinstance(got, Result):
            raise ProtocolViolation(f"expected a result, got {type(got).__name__}")
        feedback = got
    return angle_count


def serve_bob(stream, initial: StateVector, rng: RandomStream,
              transcript: Optional[list] = None) -> StateVector:
    """Run the receiver side of one session over a framed transport."""
    bob = BobSession(initial, rng)
    while bob.phase is not Phase.DONE:
        payload = stream.recv_frame()
        try:
            msg = decode_message(payload)
        except ProtocolViolation as exc:
            reply = ErrorMessage("malformed", str(exc))
            stream.send_frame(encode_message(reply))
            raise
        if transcript is not None:
            transcript.append(("alice->bob", msg))
        reply = bob.handle(msg)
        if reply is not None:
            stream.send_frame(encode_message(reply))
            if transcript is not None:
                transcript.append(("bob->alice", reply))
            if isinstance(reply, ErrorMessage):
                raise ProtocolViolation(f"{reply.code}: {reply.detail}")
    return bob.data


def run_session(program: Program, initial: StateVector, seed: int,
                max_retries: int = DEFAULT_MAX_RETRIES) -> SessionResult:
    """Full in-process session over the loopback transport.

    Bob's measurement randomness comes from ``RandomStream(seed)``, exactly
    as it would when serving over a socket, so transcripts for a given seed
    match across transports.
    """
    a_end, b_end = loopback_pair()
    alice = AliceSession(program, max_retries=max_retries)
    bob = BobSession(initial, RandomStream(seed))
    transcript: list = []
    angle_count = 0
    feedback: Optional[Result] = None
    while not alice.done:
        for msg in alice.next_messages(feedback):
            a_end.send_frame(encode_message(msg))
            transcript.append(("alice->bob", msg))
            if isinstance(msg, AngleQubit):
                angle_count += 1
        if alice.done:
            break
        reply = None
        while reply is None:
            if not b_end.pending():
                raise ProtocolViolation("receiver starved while an attempt is in flight")
            reply = bob.handle(decode_message(b_end.recv_frame()))
        b_end.send_frame(encode_message(reply))
        transcript.append(("bob->alice", reply))
        got = decode_message(a_end.recv_frame())
        if isinstance(got, ErrorMessage):
            raise ProtocolViolation(f"peer error {got.code}: {got.detail}")
        if not isinstance(got, Result):
            raise ProtocolViolation(f"expected a result, got {type(got).__name__}")
        feedback = got
    while b_end.pending():
        trailing = bob.handle(decode_message(b_end.recv_frame()))
        if trailing is not None:
            raise ProtocolViolation(f"unexpected trailing reply {trailing!r}")
    if bob.phase is not Phase.DONE:
        raise ProtocolViolation("receiver did not reach the end of the program")
    return SessionResult(bob.data, tuple(transcript), angle_count)
