# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled propagation kernel; see ``_walkcore_py`` for the reference version.

Complex arrays are viewed as interleaved doubles so the loop is plain real
arithmetic: an amplitude row is ``(Re L, Im L, Re R, Im R)``.
"""

import numpy as np


cdef void _substep(const double[:, ::1] src, double[:, ::1] dst,
                   const double[::1] c, const double[::1] s,
                   const double[:, ::1] fl, const double[:, ::1] fr,
                   Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t j, left, right
    cdef double lr, li, rr, ri, cj, sj, xr, xi, yr, yi
    for j in range(n):
        lr = src[j, 0]
        li = src[j, 1]
        rr = src[j, 2]
        ri = src[j, 3]
        cj = c[j]
        sj = s[j]
        # coin exp(i theta sigma_1)
        xr = cj * lr - sj * ri
        xi = cj * li + sj * rr
        yr = cj * rr - sj * li
        yi = cj * ri + sj * lr
        left = j - 1 if j > 0 else n - 1
        right = j + 1 if j < n - 1 else 0
        dst[left, 0] = xr * fl[j, 0] - xi * fl[j, 1]
        dst[left, 1] = xr * fl[j, 1] + xi * fl[j, 0]
        dst[right, 2] = yr * fr[j, 0] - yi * fr[j, 1]
        dst[right, 3] = yr * fr[j, 1] + yi * fr[j, 0]


cdef double _record(const double[:, ::1] a, double[::1] row, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t j
    cdef double p, total = 0.0
    for j in range(n):
        p = a[j, 0] * a[j, 0] + a[j, 1] * a[j, 1] + a[j, 2] * a[j, 2] + a[j, 3] * a[j, 3]
        row[j] = p
        total += p
    return total


def _interleaved(z):
    """``(2, N)`` complex -> ``(2, N, 2)`` doubles."""
    z = np.ascontiguousarray(z, dtype=np.complex128)
    return z.view(np.float64).reshape(z.shape[0], z.shape[1], 2)


def propagate(amp, cos_t, sin_t, fac_l, fac_r, Py_ssize_t steps, bint record=True):
    cdef Py_ssize_t n = amp.shape[0]
    cdef Py_ssize_t t
    a_np = np.array(amp, dtype=np.complex128, order="C", copy=True)
    b_np = np.empty_like(a_np)
    cdef double[:, ::1] a = a_np.view(np.float64)
    cdef double[:, ::1] b = b_np.view(np.float64)
    cdef const double[:, ::1] c = np.ascontiguousarray(cos_t, dtype=np.float64)
    cdef const double[:, ::1] s = np.ascontiguousarray(sin_t, dtype=np.float64)
    cdef const double[:, :, ::1] fl = _interleaved(fac_l)
    cdef const double[:, :, ::1] fr = _interleaved(fac_r)
    dist_np = np.zeros((steps + 1 if record else 1, n))
    totals_np = np.zeros(steps + 1)
    cdef double[:, ::1] dist = dist_np
    cdef double[::1] totals = totals_np
    with nogil:
        totals[0] = _record(a, dist[0], n)
        for t in range(steps):
            _substep(a, b, c[0], s[0], fl[0], fr[0], n)
            _substep(b, a, c[1], s[1], fl[1], fr[1], n)
            totals[t + 1] = _record(a, dist[t + 1 if record else 0], n)
    return a_np, (dist_np if record else None), totals_np
