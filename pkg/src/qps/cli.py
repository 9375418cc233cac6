"""Command-line front end.

Reports are JSON on stdout (machine-checkable, byte-stable for a fixed
config and seed); a one-line human summary goes to stderr.  Exit codes:
0 success, 1 a check or retrieval failed, 2 usage error, 3 transport
failure, 4 protocol violation.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import __version__, linalg, protocol, transport, verify
from ._kernels import BACKEND
from .commands import compose_program_unitary, parse_program
from .generators import parse_generator, rotation
from .linalg import StateVector
from .protocol import ProtocolViolation
from .retrieval import monte_carlo, retrieve_with_correction
from .rng import RandomStream
from .transport import TransportError

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_TRANSPORT = 3
EXIT_PROTOCOL = 4


def _pick_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("QPS_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise SystemExit("QPS_SEED must be an integer")
    return int.from_bytes(os.urandom(6), "big")


def _emit(report: dict, summary: str, report_path: str | None) -> None:
    text = json.dumps(report, indent=2)
    print(text)
    if report_path:
        Path(report_path).write_text(text + "\n")
    print(summary, file=sys.stderr)


def _base_report(args, seed: int, config: dict) -> dict:
    return {
        "command": args.subcommand,
        "version": __version__,
        "backend": BACKEND,
        "seed": seed,
        "config": config,
    }


def _initial_state(spec: str, num_qubits: int, rng: RandomStream) -> StateVector:
    if spec == "random":
        return linalg.random_state(num_qubits, rng)
    if spec == "zero":
        return StateVector.zero(num_qubits)
    if spec.startswith("basis:"):
        return StateVector.basis(num_qubits, int(spec.split(":", 1)[1]))
    raise ValueError(f"bad state spec {spec!r} (want random, zero, or basis:<k>)")


def cmd_retrieve(args) -> int:
    seed = _pick_seed(args)
    generator = parse_generator(args.generator, args.qubits)
    rng = RandomStream(seed)
    data = _initial_state(args.data, generator.num_qubits, rng.substream(0))
    result = retrieve_with_correction(
        args.theta, generator, data, rng.substream(1), max_attempts=args.max_attempts
    )
    if result.succeeded:
        target = linalg.apply(rotation(generator, args.theta), data)
    else:
        residual_angle = -((1 << result.attempts) - 1) * args.theta
        target = linalg.apply(rotation(generator, residual_angle), data)
    fidelity = linalg.fidelity_up_to_phase(result.state, target)
    report = _base_report(
        args,
        seed,
        {
            "generator": args.generator,
            "theta": args.theta,
            "data": args.data,
            "max_attempts": args.max_attempts,
        },
    )
    report.update(
        {
            "succeeded": result.succeeded,
            "attempts": result.attempts,
            "fidelity_vs_oracle": fidelity,
        }
    )
    word = "retrieved" if result.succeeded else "EXHAUSTED"
    _emit(
        report,
        f"{word} after {result.attempts} attempt(s); fidelity vs oracle {fidelity:.12f} (seed {seed})",
        args.report,
    )
    return EXIT_OK if result.succeeded else EXIT_FAILED


def cmd_montecarlo(args) -> int:
    seed = _pick_seed(args)
    generator = parse_generator(args.generator, args.qubits)
    data = _initial_state(args.data, generator.num_qubits, RandomStream(seed).substream(0))
    stats = monte_carlo(
        generator, args.theta, data, args.trials, seed, max_attempts=args.max_attempts
    )
    freq = stats.successes / stats.trials
    sigma = math.sqrt(0.25 / stats.trials)
    deviation = abs(freq - 0.5)
    healthy = deviation <= 5 * sigma
    report = _base_report(
        args,
        seed,
        {
            "generator": args.generator,
            "theta": args.theta,
            "data": args.data,
            "trials": args.trials,
            "max_attempts": args.max_attempts,
        },
    )
    report.update(stats.as_dict())
    report["self_check"] = {
        "success_frequency": freq,
        "sigma": sigma,
        "deviation": deviation,
        "passed": healthy,
    }
    _emit(
        report,
        f"{stats.trials} trials: success rate {freq:.4f}, mean attempts "
        f"{stats.mean_attempts:.4f} (seed {seed})",
        args.report,
    )
    return EXIT_OK if healthy else EXIT_FAILED


def _transcript_json(transcript) -> list:
    out = []
    for direction, msg in transcript:
        entry = {"dir": direction}
        entry.update(json.loads(protocol.encode_message(msg)))
        out.append(entry)
    return out


def cmd_protocol(args) -> int:
    seed = _pick_seed(args)
    if args.mode in ("loopback", "connect"):
        text = Path(args.program).read_text()
        program = parse_program(text, args.qubits)
    else:
        program = None

    if args.mode == "loopback":
        rng = RandomStream(seed)
        initial = _initial_state(args.initial, program.num_qubits, rng.substream(0))
        try:
            result = protocol.run_session(program, initial, seed, max_retries=args.max_attempts)
        except ProtocolViolation as exc:
            print(f"protocol violation: {exc}", file=sys.stderr)
            return EXIT_PROTOCOL
        target = linalg.apply(compose_program_unitary(program), initial)
        fidelity = linalg.fidelity_up_to_phase(result.final_state, target)
        report = _base_report(
            args,
            seed,
            {"mode": "loopback", "program": args.program, "initial": args.initial},
        )
        report.update(
            {
                "angle_states_sent": result.angle_states_sent,
                "fidelity_vs_oracle": fidelity,
                "transcript": _transcript_json(result.transcript),
            }
        )
        _emit(
            report,
            f"session complete: {result.angle_states_sent} angle state(s), "
            f"fidelity {fidelity:.12f} (seed {seed})",
            args.report,
        )
        return EXIT_OK

    if args.mode == "serve":
        if args.qubits is None:
            raise SystemExit("serve mode needs --qubits to size the register")
        host, port = _parse_addr(args.listen)
        try:
            server = transport.listen(host, port)
            actual_port = server.getsockname()[1]
            print(f"listening on {host}:{actual_port}", file=sys.stderr)
            stream = transport.accept(server)
        except TransportError as exc:
            print(f"transport error: {exc}", file=sys.stderr)
            return EXIT_TRANSPORT
        transcript: list = []
        rng = RandomStream(seed)
        initial = _initial_state(args.initial, args.qubits, rng.substream(0))
        try:
            final = protocol.serve_bob(stream, initial, RandomStream(seed), transcript)
        except ProtocolViolation as exc:
            print(f"protocol violation: {exc}", file=sys.stderr)
            return EXIT_PROTOCOL
        except TransportError as exc:
            print(f"transport error: {exc}", file=sys.stderr)
            return EXIT_TRANSPORT
        finally:
            stream.close()
            server.close()
        report = _base_report(
            args, seed, {"mode": "serve", "listen": args.listen, "initial": args.initial}
        )
        report.update(
            {
                "final_state": [[a.real, a.imag] for a in final.amps],
                "transcript": _transcript_json(transcript),
            }
        )
        _emit(report, f"served one session of {len(transcript)} messages (seed {seed})", args.report)
        return EXIT_OK

    # connect
    host, port = _parse_addr(args.connect)
    transcript = []
    try:
        stream = transport.connect(host, port)
    except TransportError as exc:
        print(f"transport error: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT
    try:
        angle_count = protocol.drive_alice(
            stream, program, max_retries=args.max_attempts, transcript=transcript
        )
    except ProtocolViolation as exc:
        print(f"protocol violation: {exc}", file=sys.stderr)
        return EXIT_PROTOCOL
    except TransportError as exc:
        print(f"transport error: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT
    finally:
        stream.close()
    report = _base_report(
        args, seed, {"mode": "connect", "connect": args.connect, "program": args.program}
    )
    report.update(
        {
            "angle_states_sent": angle_count,
            "transcript": _transcript_json(transcript),
        }
    )
    _emit(
        report,
        f"program transferred with {angle_count} angle state(s)",
        args.report,
    )
    return EXIT_OK


def cmd_verify(args) -> int:
    seed = _pick_seed(args)
    results = verify.run_all(max_qubits=args.qubits, seed=seed)
    all_passed = all(r.passed for r in results)
    report = _base_report(args, seed, {"qubits": args.qubits})
    report.update(
        {
            "checks": [r.as_dict() for r in results],
            "all_passed": all_passed,
        }
    )
    failed = [r.name for r in results if not r.passed]
    summary = (
        f"all {len(results)} checks passed (seed {seed})"
        if all_passed
        else f"FAILED: {', '.join(failed)} (seed {seed})"
    )
    _emit(report, summary, args.report)
    return EXIT_OK if all_passed else EXIT_FAILED


def _parse_addr(text: str) -> tuple[str, int]:
    host, _, port = text.rpartition(":")
    if not host or not port.isdigit():
        raise SystemExit(f"bad address {text!r}, want host:port")
    return host, int(port)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qps",
        description="Store operators in angle states, retrieve them probabilistically, "
        "and transfer operator programs between two parties.",
    )
    parser.add_argument("--version", action="version", version=f"qps {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=None, help="RNG seed (default: QPS_SEED or random)")
        p.add_argument("--report", default=None, help="also write the JSON report to this file")
        p.add_argument("--qubits", type=int, default=None, help="data-register size")

    p_ret = sub.add_parser("retrieve", help="single retrieval with failure correction")
    p_ret.add_argument("--generator", required=True, help="z:<i,j,...>, ps:<n>, or dense:<path>")
    p_ret.add_argument("--theta", type=float, required=True, help="stored angle, radians")
    p_ret.add_argument("--max-attempts", type=int, default=64)
    p_ret.add_argument("--data", default="random", help="initial data state: random, zero, or basis:<k>")
    common(p_ret)
    p_ret.set_defaults(func=cmd_retrieve)

    p_mc = sub.add_parser("montecarlo", help="seeded retrieval campaign with statistics")
    p_mc.add_argument("--generator", required=True)
    p_mc.add_argument("--theta", type=float, required=True)
    p_mc.add_argument("--trials", type=int, default=100_000)
    p_mc.add_argument("--max-attempts", type=int, default=64)
    p_mc.add_argument("--data", default="random")
    common(p_mc)
    p_mc.set_defaults(func=cmd_montecarlo)

    p_proto = sub.add_parser("protocol", help="run the two-party transfer")
    proto_sub = p_proto.add_subparsers(dest="mode", required=True)

    p_loop = proto_sub.add_parser("loopback", help="both parties in-process")
    p_loop.add_argument("--program", required=True, help="program file (J/X lines)")
    p_loop.add_argument("--max-attempts", type=int, default=64)
    p_loop.add_argument("--initial", default="zero", help="receiver register: random, zero, basis:<k>")
    common(p_loop)
    p_loop.set_defaults(func=cmd_protocol)

    p_serve = proto_sub.add_parser("serve", help="receiver side over a socket")
    p_serve.add_argument("--listen", required=True, help="host:port (port 0 picks one)")
    p_serve.add_argument("--initial", default="zero")
    common(p_serve)
    p_serve.set_defaults(func=cmd_protocol)

    p_conn = proto_sub.add_parser("connect", help="sender side over a socket")
    p_conn.add_argument("--connect", required=True, help="host:port of the receiver")
    p_conn.add_argument("--program", required=True)
    p_conn.add_argument("--max-attempts", type=int, default=64)
    common(p_conn)
    p_conn.set_defaults(func=cmd_protocol)

    p_verify = sub.add_parser("verify", help="run the full invariant suite")
    p_verify.add_argument("--seed", type=int, default=None)
    p_verify.add_argument("--report", default=None)
    p_verify.add_argument("--qubits", type=int, default=5, help="exhaustive-check register size")
    p_verify.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
