# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled amplitude-amplification sweep.

Fuses the unmarked-sign flip with the overlap accumulation so each iteration
makes two passes over the amplitude array instead of four, with no
intermediate temporaries. Complex values are handled as interleaved doubles
to keep the inner loops branch-light and vectorisable.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def grover_sweep(amplitudes, marked, axis, Py_ssize_t iterations):
    """Same contract as the pure-Python fallback: returns a fresh array."""
    out = np.array(amplitudes, dtype=np.complex128)
    ax_arr = np.ascontiguousarray(axis, dtype=np.complex128)
    cdef double[::1] phi = out.view(np.float64)
    cdef const double[::1] ax = ax_arr.view(np.float64)
    cdef const unsigned char[::1] is_marked = np.ascontiguousarray(marked, dtype=np.uint8)
    cdef Py_ssize_t n = is_marked.shape[0]
    cdef Py_ssize_t i, it
    cdef double o_re, o_im, sign, vr, vi, ar, ai, tr, ti

    if phi.shape[0] != 2 * n or ax.shape[0] != 2 * n:
        raise ValueError("amplitudes, marked and axis must have equal length")

    for it in range(iterations):
        o_re = 0.0
        o_im = 0.0
        for i in range(n):
            sign = 1.0 if is_marked[i] else -1.0
            vr = sign * phi[2 * i]
            vi = sign * phi[2 * i + 1]
            phi[2 * i] = vr
            phi[2 * i + 1] = vi
            ar = ax[2 * i]
            ai = ax[2 * i + 1]
            # conj(axis) * value, accumulated componentwise
            o_re += ar * vr + ai * vi
            o_im += ar * vi - ai * vr
        tr = 2.0 * o_re
        ti = 2.0 * o_im
        for i in range(n):
            ar = ax[2 * i]
            ai = ax[2 * i + 1]
            phi[2 * i] = tr * ar - ti * ai - phi[2 * i]
            phi[2 * i + 1] = tr * ai + ti * ar - phi[2 * i + 1]
    return out
