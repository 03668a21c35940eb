# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled three-level stencil update.

Must stay arithmetically identical to the numpy reference backend: same
operation order, no fused multiply-add (the build disables FP contraction),
so that both backends produce bit-identical fields.
"""

import numpy as np


def advance_steps(u_prev, u_curr, lam2, left=None, right=None):
    """Advance the recurrence len(lam2) steps. See the reference backend."""
    cdef double[::1] a = u_prev
    cdef double[::1] b = u_curr
    cdef double[::1] c = np.empty_like(u_curr)
    cdef double[::1] lam2_v = lam2
    cdef double[::1] left_v
    cdef double[::1] right_v
    cdef bint has_left = left is not None
    cdef bint has_right = right is not None
    if has_left:
        left_v = left
    if has_right:
        right_v = right

    cdef Py_ssize_t n = b.shape[0]
    cdef Py_ssize_t nsteps = lam2_v.shape[0]
    cdef Py_ssize_t s, j
    cdef double lam
    cdef double[::1] tmp

    for s in range(nsteps):
        lam = lam2_v[s]
        for j in range(1, n - 1):
            c[j] = 2.0 * b[j] - a[j] + lam * (b[j + 1] - 2.0 * b[j] + b[j - 1])
        c[0] = left_v[s] if has_left else 0.0
        c[n - 1] = right_v[s] if has_right else 0.0
        tmp = a
        a = b
        b = c
        c = tmp
    return np.asarray(a), np.asarray(b)
