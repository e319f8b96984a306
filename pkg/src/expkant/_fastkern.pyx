# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Cython fast kernels mirroring expkant._kernels_py.

Profile kinds: 0 = central B-spline of degree n, 1 = Mellin-Fejer.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, pow, sin

cnp.import_array()

cdef double TWO_PI = 6.283185307179586476925286766559


cdef double _binom(int n, int k) noexcept:
    cdef double r = 1.0
    cdef int i
    if k < 0 or k > n:
        return 0.0
    for i in range(k):
        r = r * (n - i) / (i + 1)
    return r


cdef double _factorial(int n) noexcept:
    cdef double r = 1.0
    cdef int i
    for i in range(2, n + 1):
        r *= i
    return r


cdef double _bspline1(double v, int n, double inv_fact) noexcept:
    cdef double half = 0.5 * (n + 1)
    cdef double acc = 0.0
    cdef double t
    cdef int i
    if fabs(v) >= half:
        return 0.0
    for i in range(n + 2):
        t = half + v - i
        if t > 0.0:
            if i % 2 == 0:
                acc += _binom(n + 1, i) * pow(t, n)
            else:
                acc -= _binom(n + 1, i) * pow(t, n)
    acc *= inv_fact
    if acc < 0.0:
        acc = 0.0
    return acc


cdef double _fejer1(double v) noexcept:
    cdef double half = 0.5 * v
    cdef double s
    if half == 0.0:
        return 1.0 / TWO_PI
    s = sin(half) / half
    return s * s / TWO_PI


def bspline_values(v, int n):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] arr = \
        np.ascontiguousarray(np.atleast_1d(np.asarray(v, dtype=np.float64)).ravel())
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(arr.shape[0])
    cdef double inv_fact = 1.0 / _factorial(n)
    cdef Py_ssize_t i
    for i in range(arr.shape[0]):
        out[i] = _bspline1(arr[i], n, inv_fact)
    return out.reshape(np.shape(v))


def fejer_values(v):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] arr = \
        np.ascontiguousarray(np.atleast_1d(np.asarray(v, dtype=np.float64)).ravel())
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(arr.shape[0])
    cdef Py_ssize_t i
    for i in range(arr.shape[0]):
        out[i] = _fejer1(arr[i])
    return out.reshape(np.shape(v))


def phase_weighted_sum(y, t, double beta, int kind, int n):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ya = \
        np.ascontiguousarray(np.asarray(y, dtype=np.float64).ravel())
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ta = \
        np.ascontiguousarray(np.asarray(t, dtype=np.float64).ravel())
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(ya.shape[0])
    cdef double inv_fact = 1.0 / _factorial(n) if kind == 0 else 0.0
    cdef double half_support = 0.5 * (n + 1)
    cdef Py_ssize_t i, j
    cdef double d, L, acc
    for i in range(ya.shape[0]):
        acc = 0.0
        for j in range(ta.shape[0]):
            d = ya[i] - ta[j]
            if kind == 0:
                if fabs(d) >= half_support:
                    continue
                L = _bspline1(d, n, inv_fact)
            else:
                L = _fejer1(d)
            if beta != 0.0:
                L *= pow(fabs(d), beta)
            acc += L
        out[i] = acc
    return out


def weighted_series_sum(y, t, coeffs, int kind, int n):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ya = \
        np.ascontiguousarray(np.asarray(y, dtype=np.float64).ravel())
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ta = \
        np.ascontiguousarray(np.asarray(t, dtype=np.float64).ravel())
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ca = \
        np.ascontiguousarray(np.asarray(coeffs, dtype=np.float64).ravel())
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(ya.shape[0])
    cdef double inv_fact = 1.0 / _factorial(n) if kind == 0 else 0.0
    cdef double half_support = 0.5 * (n + 1)
    cdef Py_ssize_t i, j
    cdef double d, acc
    if ta.shape[0] != ca.shape[0]:
        raise ValueError("t and coeffs must have equal length")
    for i in range(ya.shape[0]):
        acc = 0.0
        for j in range(ta.shape[0]):
            d = ya[i] - ta[j]
            if kind == 0:
                if fabs(d) >= half_support:
                    continue
                acc += _bspline1(d, n, inv_fact) * ca[j]
            else:
                acc += _fejer1(d) * ca[j]
        out[i] = acc
    return out
