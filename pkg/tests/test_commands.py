import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qps.commands import (
    CommandWord,
    Coupling,
    CouplingSkeleton,
    InvalidCommandError,
    NotGates,
    Program,
    apply_not_gates,
    compose_program_unitary,
    coupling_chain_equivalence,
    decode,
    encode,
    execute_command,
    format_program,
    generator_count,
    instruction_unitary,
    parse_program,
)
from qps.generators import PauliZSubset, rotation
from qps.linalg import IDENTITY_2, PAULI_X, StateVector, apply, fidelity_up_to_phase, kron
from qps.retrieval import make_angle_state, retrieval_step
from qps.rng import RandomStream

from conftest import AlwaysSucceed, np_rng, random_state_np

subsets = st.sets(st.integers(min_value=1, max_value=6), min_size=1).map(frozenset)


class TestCommandWord:
    def test_valid_word(self):
        w = CommandWord(0, (1, 0, 0, 1))
        assert w.subset() == frozenset({1, 4})
        assert w.as_string() == "01001"

    def test_from_string_roundtrip(self):
        w = CommandWord(1, (0, 1, 1, 0))
        assert CommandWord.from_string(w.as_string()) == w

    def test_rejects_all_zero_selection(self):
        with pytest.raises(InvalidCommandError, match="selects no gates"):
            CommandWord(0, (0, 0, 0, 0))
        with pytest.raises(InvalidCommandError):
            CommandWord(1, (0, 0))

    def test_rejects_bad_bits(self):
        with pytest.raises(InvalidCommandError):
            CommandWord(2, (1, 0))
        with pytest.raises(InvalidCommandError):
            CommandWord(0, (1, 3))
        with pytest.raises(InvalidCommandError):
            CommandWord(0, ())

    def test_from_string_rejects_junk(self):
        for bad in ("", "0", "0102", "x101"):
            with pytest.raises(InvalidCommandError):
                CommandWord.from_string(bad)


class TestEncodeDecode:
    def test_endpoints_coupling_example(self):
        # J on qubits {1, n} with n = 4 must produce the 1001 pattern
        word, angle = encode(Coupling(frozenset({1, 4}), 0.33), 4)
        assert word.c0 == 0
        assert word.bits == (1, 0, 0, 1)
        assert angle is not None and angle.theta == 0.33

    def test_not_gates_example(self):
        word, angle = encode(NotGates(frozenset({2})), 4)
        assert word.c0 == 1
        assert word.bits == (0, 1, 0, 0)
        assert angle is None

    def test_full_subset_is_all_ones(self):
        word, _ = encode(Coupling(frozenset(range(1, 6)), 1.0), 5)
        assert word.bits == (1, 1, 1, 1, 1)

    def test_decode_coupling_skeleton(self):
        assert decode(CommandWord(0, (1, 0, 0, 1))) == CouplingSkeleton(frozenset({1, 4}))

    def test_decode_not_gates(self):
        assert decode(CommandWord(1, (1, 1, 1, 1))) == NotGates(frozenset({1, 2, 3, 4}))

    def test_roundtrip_all_words_up_to_8_qubits(self):
        total = 0
        for n in range(1, 9):
            for bits in range(1, 1 << n):
                subset = frozenset(i + 1 for i in range(n) if bits & (1 << (n - 1 - i)))
                for instr in (Coupling(subset, 0.7), NotGates(subset)):
                    word, _ = encode(instr, n)
                    assert decode(word).qubits == subset
                    assert CommandWord.from_string(word.as_string()) == word
                    total += 1
        assert total == sum(2 * ((1 << n) - 1) for n in range(1, 9))

    @settings(max_examples=60, deadline=None)
    @given(subsets, st.booleans())
    def test_roundtrip_property(self, subset, is_not):
        instr = NotGates(subset) if is_not else Coupling(subset, 0.1)
        word, angle = encode(instr, 6)
        assert decode(word).qubits == subset
        assert (angle is None) == is_not

    def test_empty_subset_rejected_at_instruction(self):
        with pytest.raises(InvalidCommandError):
            Coupling(frozenset(), 1.0)
        with pytest.raises(InvalidCommandError):
            NotGates(frozenset())


class TestExecute:
    def test_coupling_matches_direct_step(self):
        # one command word must drive exactly the same dynamics as the
        # subset generator does when used directly
        theta = 1.07
        word, _ = encode(Coupling(frozenset({1, 2}), theta), 2)
        data = random_state_np(2, np_rng(0))
        out_cmd = execute_command(word, make_angle_state(theta), data, RandomStream(55))
        out_direct = retrieval_step(
            make_angle_state(theta), PauliZSubset(2, frozenset({1, 2})), data, RandomStream(55)
        )
        assert out_cmd.success == out_direct.success
        assert np.array_equal(out_cmd.post_data.amps, out_direct.post_data.amps)

    def test_coupling_success_branch_against_rotation_oracle(self):
        theta = -0.42
        word, angle = encode(Coupling(frozenset({1, 3}), theta), 3)
        data = random_state_np(3, np_rng(1))
        out = execute_command(word, angle, data, AlwaysSucceed())
        target = apply(rotation(PauliZSubset(3, frozenset({1, 3})), theta), data)
        assert fidelity_up_to_phase(out.post_data, target) >= 1 - 1e-10

    def test_not_gates_on_basis_state(self):
        word, _ = encode(NotGates(frozenset({1})), 2)
        out = execute_command(word, None, StateVector.zero(2), RandomStream(0))
        assert out.success and out.measured_bit == 0 and out.attempt_angle is None
        assert out.post_data == StateVector.basis(2, 2)  # |00> -> |10>

    def test_not_gates_deterministic_across_seeds(self):
        word, _ = encode(NotGates(frozenset({1, 2})), 2)
        data = random_state_np(2, np_rng(2))
        results = {
            execute_command(word, None, data, RandomStream(seed)).post_data
            for seed in range(100)
        }
        assert len(results) == 1

    def test_coupling_without_angle_rejected(self):
        word, _ = encode(Coupling(frozenset({1}), 0.2), 1)
        with pytest.raises(InvalidCommandError, match="requires an angle"):
            execute_command(word, None, StateVector.zero(1), RandomStream(0))

    def test_not_gates_with_angle_rejected(self):
        word, _ = encode(NotGates(frozenset({1})), 1)
        with pytest.raises(InvalidCommandError, match="must not carry"):
            execute_command(word, make_angle_state(0.1), StateVector.zero(1), RandomStream(0))

    def test_word_register_mismatch_rejected(self):
        word, _ = encode(NotGates(frozenset({1})), 2)
        with pytest.raises(InvalidCommandError, match="data has"):
            execute_command(word, None, StateVector.zero(3), RandomStream(0))


def test_apply_not_gates_matches_dense_oracle():
    rng = np_rng(3)
    for n in range(1, 5):
        for bits in range(1, 1 << n):
            subset = frozenset(i + 1 for i in range(n) if bits & (1 << i))
            data = random_state_np(n, rng)
            dense = np.eye(1, dtype=complex)
            for q in range(1, n + 1):
                dense = kron(dense, PAULI_X if q in subset else IDENTITY_2)
            expected = apply(dense, data)
            assert np.allclose(apply_not_gates(subset, data).amps, expected.amps, atol=1e-15)


class TestCouplingChain:
    def test_single_qubit_is_cz(self):
        assert coupling_chain_equivalence(1, frozenset({1}))

    def test_three_qubit_full(self):
        assert coupling_chain_equivalence(3, frozenset({1, 2, 3}))

    def test_partial_subset(self):
        assert coupling_chain_equivalence(4, frozenset({2, 4}))


class TestGeneratorCount:
    def test_small_values(self):
        assert generator_count(1) == 1
        assert generator_count(4) == 15

    def test_matches_enumeration_at_8(self):
        words = set()
        for bits in range(1, 1 << 8):
            subset = frozenset(i + 1 for i in range(8) if bits & (1 << i))
            word, _ = encode(Coupling(subset, 1.0), 8)
            words.add(word.as_string())
        assert len(words) == generator_count(8) == 255

    def test_range_validated(self):
        with pytest.raises(ValueError):
            generator_count(0)
        with pytest.raises(ValueError):
            generator_count(21)


class TestCompose:
    def test_empty_program(self):
        assert np.array_equal(compose_program_unitary(Program(2, ())), np.eye(4))

    def test_single_coupling(self):
        p = Program(2, (Coupling(frozenset({1}), 0.9),))
        expected = rotation(PauliZSubset(2, frozenset({1})), 0.9)
        assert np.array_equal(compose_program_unitary(p), expected)

    def test_double_not_is_identity(self):
        p = Program(1, (NotGates(frozenset({1})), NotGates(frozenset({1}))))
        assert np.allclose(compose_program_unitary(p), np.eye(2), atol=0)

    def test_application_order_is_list_order(self):
        j = Coupling(frozenset({1}), 1.2)
        x = NotGates(frozenset({1}))
        p = Program(1, (x, j))
        expected = instruction_unitary(j, 1) @ instruction_unitary(x, 1)
        assert np.array_equal(compose_program_unitary(p), expected)
        assert not np.allclose(
            compose_program_unitary(p), compose_program_unitary(Program(1, (j, x)))
        )


class TestProgramModel:
    def test_out_of_range_target_rejected(self):
        with pytest.raises(InvalidCommandError, match="outside"):
            Program(2, (Coupling(frozenset({3}), 1.0),))

    def test_parse_basic(self):
        p = parse_program("J 1,3 0.5\nX 2\n# comment\n\nJ 1 -1.25e-1\n")
        assert p.num_qubits == 3
        assert p.instructions == (
            Coupling(frozenset({1, 3}), 0.5),
            NotGates(frozenset({2})),
            Coupling(frozenset({1}), -0.125),
        )

    def test_parse_explicit_register_size(self):
        p = parse_program("J 1 0.5", num_qubits=4)
        assert p.num_qubits == 4

    def test_parse_errors(self):
        for bad in ("Q 1 0.5", "J 1", "J a 0.5", "J 1 abc", "X", "J 1 inf"):
            with pytest.raises(InvalidCommandError):
                parse_program(bad)

    def test_format_parse_roundtrip(self):
        p = Program(
            4,
            (
                Coupling(frozenset({1, 4}), math.pi / 7),
                NotGates(frozenset({2, 3})),
                Coupling(frozenset({2}), -11.75),
            ),
        )
        assert parse_program(format_program(p), num_qubits=4) == p

    def test_empty_program_text(self):
        assert parse_program("", num_qubits=2) == Program(2, ())
        assert format_program(Program(2, ())) == ""
