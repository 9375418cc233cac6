"""Pin the compiled kernel against the pure Python implementation.

The two share one RNG scheme and one step contract; attempts sequences are
compared exactly (a divergence would need a uniform draw within an ulp of
the branch weight), collapsed amplitudes with tolerances (summation order
may differ across backends).
"""

import math

import numpy as np
import pytest

from qps import rng
from qps._kernels import _fallback

_core = pytest.importorskip("qps._kernels._core")

from conftest import dense_self_inverse, np_rng, random_state_np


def _random_inputs(seed, num_qubits=3):
    g = np_rng(seed)
    theta = g.uniform(-2 * math.pi, 2 * math.pi)
    a0 = complex(math.cos(theta / 2))
    a1 = -1j * math.sin(theta / 2)
    signs = g.choice([-1.0, 1.0], size=1 << num_qubits)
    data = random_state_np(num_qubits, g).amps.copy()
    return a0, a1, signs, data


def test_rng_primitives_match():
    g = np_rng(0)
    for _ in range(20_000):
        z = int(g.integers(0, 1 << 64, dtype=np.uint64))
        i = int(g.integers(0, 1 << 32))
        assert _core.mix64(z) == rng.mix64(z)
        assert _core.child_key(z, i) == rng.child_key(z, i)
        assert _core.uniform_at(z, i) == rng.uniform_at(z, i)


@pytest.mark.parametrize("u", [0.0, 0.25, 0.4999999, 0.5000001, 0.75, 0.999999999])
def test_step_diag_matches_fallback(u):
    a0, a1, signs, data = _random_inputs(1)
    d_native = data.copy()
    d_python = data.copy()
    bit_n, p0_n = _core.step_diag(a0, a1, signs, d_native, u)
    bit_p, p0_p = _fallback.step_diag(a0, a1, signs, d_python, u)
    assert bit_n == bit_p
    assert p0_n == pytest.approx(p0_p, abs=1e-14)
    assert np.max(np.abs(d_native - d_python)) <= 1e-14


@pytest.mark.parametrize("u", [0.1, 0.5, 0.9])
def test_step_dense_matches_fallback(u):
    a0, a1, _, data = _random_inputs(2)
    bmat = dense_self_inverse(3, np_rng(3)).matrix()
    d_native = data.copy()
    d_python = data.copy()
    bit_n, p0_n = _core.step_dense(a0, a1, bmat, d_native, u)
    bit_p, p0_p = _fallback.step_dense(a0, a1, bmat, d_python, u)
    assert bit_n == bit_p
    assert p0_n == pytest.approx(p0_p, abs=1e-13)
    assert np.max(np.abs(d_native - d_python)) <= 1e-13


def test_step_collapses_in_place_and_normalizes():
    for impl in (_core, _fallback):
        a0, a1, signs, data = _random_inputs(4)
        original = data.copy()
        bit, p0 = impl.step_diag(a0, a1, signs, data, 0.3)
        assert bit in (0, 1)
        assert abs(p0 - 0.5) <= 1e-12
        assert not np.array_equal(data, original)
        assert abs(np.linalg.norm(data) - 1.0) <= 1e-12


def test_diag_and_dense_agree_on_diagonal_generator():
    for impl in (_core, _fallback):
        a0, a1, signs, data = _random_inputs(5)
        d_diag = data.copy()
        d_dense = data.copy()
        bit_a, p0_a = impl.step_diag(a0, a1, signs, d_diag, 0.42)
        bit_b, p0_b = impl.step_dense(a0, a1, np.diag(signs).astype(complex), d_dense, 0.42)
        assert bit_a == bit_b
        assert p0_a == pytest.approx(p0_b, abs=1e-13)
        assert np.max(np.abs(d_diag - d_dense)) <= 1e-13


def test_correction_attempts_identical_across_backends():
    signs = np.array([1.0, -1.0, -1.0, 1.0])
    data = random_state_np(2, np_rng(6)).amps.copy()
    key = rng.root_key(987)
    for theta in (0.7, -2.4, 12.0):
        native = _core.correction_attempts_diag(theta, signs, data, key, 4000, 64)
        python = _fallback.correction_attempts_diag(theta, signs, data, key, 4000, 64)
        assert np.array_equal(native[0], python[0])
        assert np.array_equal(native[1], python[1])


def test_correction_attempts_dense_identical_across_backends():
    bmat = dense_self_inverse(2, np_rng(7)).matrix()
    data = random_state_np(2, np_rng(8)).amps.copy()
    key = rng.root_key(11)
    native = _core.correction_attempts_dense(1.3, bmat, data, key, 1500, 64)
    python = _fallback.correction_attempts_dense(1.3, bmat, data, key, 1500, 64)
    assert np.array_equal(native[0], python[0])
    assert np.array_equal(native[1], python[1])


def test_attempts_are_geometric_for_both_backends():
    signs = np.array([1.0, -1.0])
    data = np.array([1.0, 0.0], dtype=complex)
    for impl in (_core, _fallback):
        attempts, succeeded = impl.correction_attempts_diag(
            1.0, signs, data, rng.root_key(5), 20_000, 64
        )
        assert succeeded.all()
        assert abs(np.mean(attempts) - 2.0) < 0.04
        assert abs(np.mean(attempts == 1) - 0.5) < 0.012


def test_max_attempts_exhaustion_reported():
    signs = np.array([1.0, -1.0])
    data = np.array([1.0, 0.0], dtype=complex)
    for impl in (_core, _fallback):
        attempts, succeeded = impl.correction_attempts_diag(
            1.0, signs, data, rng.root_key(5), 2000, 1
        )
        assert set(np.unique(attempts)) == {1}
        assert 0 < int(succeeded.sum()) < 2000


def test_backend_selection_reports_something():
    from qps import _kernels

    assert _kernels.BACKEND in ("native", "python")
