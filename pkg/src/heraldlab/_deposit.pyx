# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled event-deposition kernel.

Splats one Gaussian stamp per photon event into an integer count image using
stochastic rounding: each stamp cell deposits ``floor(v)`` counts plus one
more when the supplied uniform draw falls below ``v - floor(v)``, so the
expected deposit equals ``v`` exactly and all accumulation is integer (the
result cannot depend on event order or accumulation strategy).

All randomness (per-event amplitudes, per-cell uniforms) is drawn by the
caller; this kernel is pure deterministic arithmetic and is bit-for-bit
interchangeable with the numpy fallback in ``_deposit_py``.
"""

from libc.math cimport floor

import numpy as np

cimport numpy as cnp


def deposit(
    cnp.uint32_t[:, ::1] counts,
    cnp.int64_t[::1] iy,
    cnp.int64_t[::1] ix,
    cnp.float64_t[::1] amplitudes,
    cnp.float64_t[:, ::1] stamp,
    cnp.float64_t[:, :, ::1] uniforms,
):
    cdef Py_ssize_t n_events = iy.shape[0]
    cdef Py_ssize_t k = stamp.shape[0]
    cdef Py_ssize_t radius = (k - 1) // 2
    cdef Py_ssize_t height = counts.shape[0]
    cdef Py_ssize_t width = counts.shape[1]
    cdef Py_ssize_t e, a, b
    cdef Py_ssize_t ty, tx
    cdef double v, base
    cdef unsigned long long q

    if ix.shape[0] != n_events or amplitudes.shape[0] != n_events:
        raise ValueError("event arrays must have equal length")
    if stamp.shape[1] != k or k % 2 == 0:
        raise ValueError("stamp must be square with odd size")
    if (
        uniforms.shape[0] != n_events
        or uniforms.shape[1] != k
        or uniforms.shape[2] != k
    ):
        raise ValueError("uniforms must have shape (n_events, k, k)")

    for e in range(n_events):
        for a in range(k):
            ty = iy[e] + a - radius
            if ty < 0 or ty >= height:
                continue
            for b in range(k):
                tx = ix[e] + b - radius
                if tx < 0 or tx >= width:
                    continue
                v = amplitudes[e] * stamp[a, b]
                base = floor(v)
                q = <unsigned long long> base
                if uniforms[e, a, b] < v - base:
                    q += 1
                counts[ty, tx] += <cnp.uint32_t> q
