# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementation of the hot kernels.

Mirrors ``_fallback.py``: one gate-array step (mix carrier amplitudes into
the register through the generator, measure, collapse in place) and the
batched correction loop.  The uniform stream is the same SplitMix64-style
counter-based scheme as :mod:`qps.rng`, re-implemented here in C so a batch
of trials never crosses back into Python.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, ldexp, sin, sqrt

cnp.import_array()

ctypedef unsigned long long u64

cdef u64 _MIX_A = 0xBF58476D1CE4E5B9ULL
cdef u64 _MIX_B = 0x94D049BB133111EBULL
cdef u64 _GAMMA = 0x9E3779B97F4A7C15ULL
cdef u64 _SPLIT_SALT = 0x5851F42D4C957F2DULL


cdef inline u64 _mix64(u64 z) nogil:
    z = (z ^ (z >> 30)) * _MIX_A
    z = (z ^ (z >> 27)) * _MIX_B
    return z ^ (z >> 31)


cdef inline u64 _child_key(u64 key, u64 index) nogil:
    return _mix64((key ^ _SPLIT_SALT) + (index + 1) * _GAMMA)


cdef inline double _uniform_at(u64 key, u64 counter) nogil:
    return ldexp(<double> (_mix64(key + counter * _GAMMA) >> 11), -53)


def mix64(z):
    """C-side SplitMix64 finalizer, exported so tests can pin it to qps.rng."""
    return _mix64(<u64> z)


def child_key(key, index):
    """C-side substream derivation, exported for tests."""
    return _child_key(<u64> key, <u64> index)


def uniform_at(key, counter):
    """C-side counter-based draw, exported for tests."""
    return _uniform_at(<u64> key, <u64> counter)


cdef int _step_diag_c(double complex a0, double complex a1,
                      const double[::1] signs, double complex[::1] data,
                      double u, double* p0_out) nogil:
    cdef Py_ssize_t i, dim = data.shape[0]
    cdef double complex w, b0, b1
    cdef double s0 = 0.0, s1 = 0.0, scale
    cdef int bit

    for i in range(dim):
        w = a1 * (signs[i] * data[i])
        b0 = a0 * data[i] + w
        b1 = a0 * data[i] - w
        s0 += b0.real * b0.real + b0.imag * b0.imag
        s1 += b1.real * b1.real + b1.imag * b1.imag
    p0_out[0] = 0.5 * s0

    bit = 0 if u < p0_out[0] else 1
    if bit == 0 and s0 == 0.0:
        bit = 1
    elif bit == 1 and s1 == 0.0:
        bit = 0

    scale = 1.0 / sqrt(s0 if bit == 0 else s1)
    for i in range(dim):
        w = a1 * (signs[i] * data[i])
        if bit == 0:
            data[i] = (a0 * data[i] + w) * scale
        else:
            data[i] = (a0 * data[i] - w) * scale
    return bit


cdef int _step_dense_c(double complex a0, double complex a1,
                       const double complex[:, ::1] bmat,
                       double complex[::1] data, double complex[::1] scratch,
                       double u, double* p0_out) nogil:
    cdef Py_ssize_t i, j, dim = data.shape[0]
    cdef double complex acc, b0, b1
    cdef double s0 = 0.0, s1 = 0.0, scale
    cdef int bit

    for i in range(dim):
        acc = 0
        for j in range(dim):
            acc = acc + bmat[i, j] * data[j]
        scratch[i] = a1 * acc

    for i in range(dim):
        b0 = a0 * data[i] + scratch[i]
        b1 = a0 * data[i] - scratch[i]
        s0 += b0.real * b0.real + b0.imag * b0.imag
        s1 += b1.real * b1.real + b1.imag * b1.imag
    p0_out[0] = 0.5 * s0

    bit = 0 if u < p0_out[0] else 1
    if bit == 0 and s0 == 0.0:
        bit = 1
    elif bit == 1 and s1 == 0.0:
        bit = 0

    scale = 1.0 / sqrt(s0 if bit == 0 else s1)
    for i in range(dim):
        if bit == 0:
            data[i] = (a0 * data[i] + scratch[i]) * scale
        else:
            data[i] = (a0 * data[i] - scratch[i]) * scale
    return bit


def step_diag(double complex a0, double complex a1, signs, data, double u):
    """One step for a diagonal generator; collapses ``data`` in place."""
    cdef const double[::1] s = np.ascontiguousarray(signs, dtype=np.float64)
    cdef double complex[::1] d = data
    cdef double p0 = 0.0
    cdef int bit = _step_diag_c(a0, a1, s, d, u, &p0)
    return bit, p0


def step_dense(double complex a0, double complex a1, bmat, data, double u):
    """One step for a dense generator matrix; collapses ``data`` in place."""
    cdef const double complex[:, ::1] b = np.ascontiguousarray(bmat, dtype=np.complex128)
    cdef double complex[::1] d = data
    scratch = np.empty(d.shape[0], dtype=np.complex128)
    cdef double complex[::1] w = scratch
    cdef double p0 = 0.0
    cdef int bit = _step_dense_c(a0, a1, b, d, w, u, &p0)
    return bit, p0


def correction_attempts_diag(double theta, signs, data0, key, long trials,
                             long max_attempts):
    """Attempt counts for ``trials`` correction-loop runs, diagonal generator.

    Same stream/substream contract as the fallback: trial ``t`` draws from
    substream ``t`` of ``key``, attempt ``m`` uses angle ``2**(m-1)*theta``
    and uniform draw ``m``.
    """
    cdef const double[::1] s = np.ascontiguousarray(signs, dtype=np.float64)
    cdef const double complex[::1] d0 = np.ascontiguousarray(data0, dtype=np.complex128)
    cdef Py_ssize_t dim = d0.shape[0]
    cdef u64 base = <u64> key, trial_key
    attempts_arr = np.empty(trials, dtype=np.int64)
    succeeded_arr = np.zeros(trials, dtype=np.uint8)
    work = np.empty(dim, dtype=np.complex128)
    cdef long long[::1] attempts = attempts_arr
    cdef unsigned char[::1] succeeded = succeeded_arr
    cdef double complex[::1] d = work
    cdef long t, m, used
    cdef double angle, p0
    cdef double complex a0, a1

    with nogil:
        for t in range(trials):
            trial_key = _child_key(base, <u64> t)
            d[:] = d0
            used = max_attempts
            for m in range(1, max_attempts + 1):
                angle = ldexp(theta, <int> (m - 1))
                a0 = cos(0.5 * angle)
                a1 = -1j * sin(0.5 * angle)
                if _step_diag_c(a0, a1, s, d, _uniform_at(trial_key, <u64> m), &p0) == 0:
                    used = m
                    succeeded[t] = 1
                    break
            attempts[t] = used
    return attempts_arr, succeeded_arr


def correction_attempts_dense(double theta, bmat, data0, key, long trials,
                              long max_attempts):
    """Dense-generator variant of :func:`correction_attempts_diag`."""
    cdef const double complex[:, ::1] b = np.ascontiguousarray(bmat, dtype=np.complex128)
    cdef const double complex[::1] d0 = np.ascontiguousarray(data0, dtype=np.complex128)
    cdef Py_ssize_t dim = d0.shape[0]
    cdef u64 base = <u64> key, trial_key
    attempts_arr = np.empty(trials, dtype=np.int64)
    succeeded_arr = np.zeros(trials, dtype=np.uint8)
    work = np.empty(dim, dtype=np.complex128)
    scratch = np.empty(dim, dtype=np.complex128)
    cdef long long[::1] attempts = attempts_arr
    cdef unsigned char[::1] succeeded = succeeded_arr
    cdef double complex[::1] d = work
    cdef double complex[::1] w = scratch
    cdef long t, m, used
    cdef double angle, p0
    cdef double complex a0, a1

    with nogil:
        for t in range(trials):
            trial_key = _child_key(base, <u64> t)
            d[:] = d0
            used = max_attempts
            for m in range(1, max_attempts + 1):
                angle = ldexp(theta, <int> (m - 1))
                a0 = cos(0.5 * angle)
                a1 = -1j * sin(0.5 * angle)
                if _step_dense_c(a0, a1, b, d, w, _uniform_at(trial_key, <u64> m), &p0) == 0:
                    used = m
                    succeeded[t] = 1
                    break
            attempts[t] = used
    return attempts_arr, succeeded_arr
