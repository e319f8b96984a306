"""Pure-numpy implementations of the hot kernels.

These are the reference implementations; expkant._fastkern provides
Cython versions with identical semantics.  expkant.backend picks one at
import time.

Profile kinds (shared with the compiled module):
    0 -- central B-spline of degree n (convolution of n+1 unit indicators,
         support [-(n+1)/2, (n+1)/2] in the log variable)
    1 -- Mellin-Fejer profile (1/(2*pi)) * (sin(v/2)/(v/2))**2
"""

import math

import numpy as np

KIND_BSPLINE = 0
KIND_FEJER = 1

# Keep broadcasted (phase x node) blocks below ~8M doubles.
_CHUNK = 8_000_000


def bspline_values(v, n):
    """Central B-spline of degree ``n`` evaluated at log-variable ``v``.

    Truncated-power representation
        B(v) = (1/n!) * sum_i (-1)^i C(n+1, i) ((n+1)/2 + v - i)_+^n.
    """
    v = np.asarray(v, dtype=float)
    half = 0.5 * (n + 1)
    # evaluate only inside the support: outside it the alternating sum
    # cancels exactly in theory but leaves round-off residue in floats
    inside = np.abs(v) < half
    vi = v[inside]
    acc = np.zeros_like(vi)
    for i in range(n + 2):
        t = half + vi - i
        np.maximum(t, 0.0, out=t)
        acc += ((-1) ** i) * math.comb(n + 1, i) * t**n
    acc /= math.factorial(n)
    # clip tiny negative round-off near the support boundary
    np.maximum(acc, 0.0, out=acc)
    out = np.zeros_like(v)
    out[inside] = acc
    return out


def fejer_values(v):
    """Mellin-Fejer profile at log-variable ``v``; value 1/(2*pi) at v=0."""
    v = np.asarray(v, dtype=float)
    half = 0.5 * v
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(half != 0.0, np.sin(half) / np.where(half != 0.0, half, 1.0), 1.0)
    return s * s / (2.0 * math.pi)


def _profile_values(kind, n, v):
    if kind == KIND_BSPLINE:
        return bspline_values(v, n)
    if kind == KIND_FEJER:
        return fejer_values(v)
    raise ValueError(f"unknown profile kind {kind}")


def phase_weighted_sum(y, t, beta, kind, n):
    """For each phase ``y_i`` return ``sum_j L(y_i - t_j) |y_i - t_j|**beta``.

    ``t`` is the (finite) window of node positions retained for the sum;
    ``beta = 0`` reduces to the plain partition sum.
    """
    y = np.asarray(y, dtype=float)
    t = np.asarray(t, dtype=float)
    out = np.empty(y.shape, dtype=float)
    if t.size == 0:
        out[:] = 0.0
        return out
    step = max(1, _CHUNK // max(1, t.size))
    for lo in range(0, y.size, step):
        block = y[lo:lo + step, None] - t[None, :]
        vals = _profile_values(kind, n, block)
        if beta != 0.0:
            vals = vals * np.abs(block) ** beta
        out[lo:lo + step] = vals.sum(axis=1)
    return out


def weighted_series_sum(y, t, coeffs, kind, n):
    """For each phase ``y_i`` return ``sum_j L(y_i - t_j) * coeffs_j``.

    The inner loop of operator evaluation on dense grids.
    """
    y = np.asarray(y, dtype=float)
    t = np.asarray(t, dtype=float)
    coeffs = np.asarray(coeffs, dtype=float)
    out = np.empty(y.shape, dtype=float)
    if t.size == 0:
        out[:] = 0.0
        return out
    step = max(1, _CHUNK // max(1, t.size))
    for lo in range(0, y.size, step):
        block = y[lo:lo + step, None] - t[None, :]
        vals = _profile_values(kind, n, block)
        out[lo:lo + step] = vals @ coeffs
    return out
