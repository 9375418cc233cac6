"""Pure numpy implementation of the hot kernels.

Semantics must track ``_core.pyx``: one gate-array step mixes the carrier
amplitudes ``(a0, a1)`` into the data register through the generator,
measures the carrier with uniform draw ``u``, and collapses the register in
place.  The batched correction loop reruns the step with doubled angles,
drawing uniform ``m`` of substream ``t`` for attempt ``m`` of trial ``t``.
"""

from __future__ import annotations

import math

import numpy as np

from ..rng import child_key, uniform_at


def _finish_step(data: np.ndarray, b0: np.ndarray, b1: np.ndarray, u: float):
    s0 = float(np.vdot(b0, b0).real)
    s1 = float(np.vdot(b1, b1).real)
    p0 = 0.5 * s0
    bit = 0 if u < p0 else 1
    # a zero-weight branch is unreachable physically; never collapse onto it
    if bit == 0 and s0 == 0.0:
        bit = 1
    elif bit == 1 and s1 == 0.0:
        bit = 0
    if bit == 0:
        data[:] = b0 / math.sqrt(s0)
    else:
        data[:] = b1 / math.sqrt(s1)
    return bit, p0


def step_diag(a0: complex, a1: complex, signs: np.ndarray, data: np.ndarray, u: float):
    """One step for a diagonal generator (``signs`` holds its +-1 diagonal).

    ``data`` is collapsed in place; returns ``(measured_bit, weight_of_bit0)``.
    """
    w = signs * data
    b0 = a0 * data + a1 * w
    b1 = a0 * data - a1 * w
    return _finish_step(data, b0, b1, u)


def step_dense(a0: complex, a1: complex, bmat: np.ndarray, data: np.ndarray, u: float):
    """One step for a dense generator matrix."""
    w = bmat @ data
    b0 = a0 * data + a1 * w
    b1 = a0 * data - a1 * w
    return _finish_step(data, b0, b1, u)


def _correction_attempts(step, operator, theta, data0, key, trials, max_attempts):
    attempts = np.empty(trials, dtype=np.int64)
    succeeded = np.zeros(trials, dtype=np.uint8)
    for t in range(trials):
        trial_key = child_key(key, t)
        data = data0.copy()
        used = max_attempts
        for m in range(1, max_attempts + 1):
            angle = math.ldexp(theta, m - 1)
            a0 = math.cos(0.5 * angle)
            a1 = -1j * math.sin(0.5 * angle)
            bit, _ = step(a0, a1, operator, data, uniform_at(trial_key, m))
            if bit == 0:
                used = m
                succeeded[t] = 1
                break
        attempts[t] = used
    return attempts, succeeded


def correction_attempts_diag(theta, signs, data0, key, trials, max_attempts):
    """Attempt counts for ``trials`` correction-loop runs, diagonal generator.

    Trial ``t`` draws from substream ``t`` of the stream keyed ``key``; its
    attempt ``m`` uses angle ``2**(m-1) * theta`` and uniform draw ``m``.
    Returns ``(attempts, succeeded)`` arrays; a trial that exhausts
    ``max_attempts`` reports ``attempts == max_attempts`` with
    ``succeeded == 0``.
    """
    return _correction_attempts(step_diag, signs, theta, data0, key, trials, max_attempts)


def correction_attempts_dense(theta, bmat, data0, key, trials, max_attempts):
    """Dense-generator variant of :func:`correction_attempts_diag`."""
    return _correction_attempts(step_dense, bmat, theta, data0, key, trials, max_attempts)
