"""Built-in test signals with analytic regularity metadata.

All are defined through their log-variable core g(v) = f(e^v); the
metadata (sup norm, support, log-Holder order, Mellin derivative) is exact,
so experiments can compare measured quantities against ground truth.
"""

from __future__ import annotations

import math

import numpy as np

from .core import Signal, ValidationError


def constant(c: float) -> Signal:
    return Signal(
        name=f"constant({c:g})",
        evaluate=lambda x: np.full_like(np.asarray(x, dtype=float), c),
        sup_norm=abs(c),
        holder=(1.0, 0.0),
        mellin_derivative=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
    )


def _saturate(v: np.ndarray, clip: float) -> np.ndarray:
    """v on [-clip, clip], saturating smoothly (C^1, slope <= 1) outside."""
    a = np.abs(v)
    out = np.where(a <= clip, v, np.sign(v) * (clip + 1.0 - np.exp(clip - a)))
    return out


def clipped_log(clip: float = 6.0) -> Signal:
    """ln x on [e^-clip, e^clip], saturating smoothly to +-(clip+1) outside.

    Globally Lipschitz with constant 1 in the log variable, so the
    log-modulus of continuity is exactly min(delta, ...) = delta for small
    delta, and theta f = 1 on the interior.
    """
    if clip <= 0:
        raise ValidationError("clipped_log needs clip > 0")

    def evaluate(x):
        # log(0) = -inf saturates to -(clip + 1); silence the warning
        with np.errstate(divide="ignore"):
            return _saturate(np.log(np.asarray(x, dtype=float)), clip)

    def theta(x):
        v = np.log(np.asarray(x, dtype=float))
        a = np.abs(v)
        return np.where(a <= clip, 1.0, np.exp(clip - a))

    return Signal(
        name=f"clipped_log({clip:g})",
        evaluate=evaluate,
        sup_norm=clip + 1.0,
        holder=(1.0, 1.0),
        mellin_derivative=theta,
        log_growth=(0.0, 1.0),
    )


def power_clipped(a: float, clip: float = 6.0) -> Signal:
    """x^a with the exponent's log saturated outside [-clip, clip]."""

    def f(x):
        return np.exp(a * _saturate(np.log(np.asarray(x, dtype=float)), clip))

    def theta(x):
        v = np.log(np.asarray(x, dtype=float))
        slope = np.where(np.abs(v) <= clip, 1.0, np.exp(clip - np.abs(v)))
        return a * slope * f(x)

    return Signal(
        name=f"power_clipped({a:g},{clip:g})",
        evaluate=f,
        sup_norm=math.exp(abs(a) * (clip + 1.0)),
        mellin_derivative=theta,
    )


def sin_log() -> Signal:
    """sin(ln x): bounded, log-Lipschitz-1, theta f = cos(ln x)."""
    return Signal(
        name="sin_log",
        evaluate=lambda x: np.sin(np.log(np.asarray(x, dtype=float))),
        sup_norm=1.0,
        holder=(1.0, 1.0),
        mellin_derivative=lambda x: np.cos(np.log(np.asarray(x, dtype=float))),
    )


def holder_bump(nu: float, radius: float = 2.0) -> Signal:
    """f(e^v) = (1 - (|v|/R)^nu)_+: compact support [e^-R, e^R], exact
    log-modulus of continuity (delta/R)^nu for delta <= R."""
    if not (0.0 < nu <= 1.0) or radius <= 0:
        raise ValidationError("holder_bump needs nu in (0,1] and radius > 0")

    def f(x):
        v = np.log(np.asarray(x, dtype=float))
        return np.maximum(0.0, 1.0 - (np.abs(v) / radius) ** nu)

    sig = Signal(
        name=f"holder_bump({nu:g},{radius:g})",
        evaluate=f,
        sup_norm=1.0,
        support=math.exp(radius),
        holder=(nu, radius ** (-nu)),
    )
    if nu == 1.0:
        # tent function: theta f defined away from the kinks
        def theta(x):
            v = np.log(np.asarray(x, dtype=float))
            inside = (np.abs(v) < radius) & (v != 0.0)
            return np.where(inside, -np.sign(v) / radius, 0.0)

        sig = Signal(name=sig.name, evaluate=f, sup_norm=1.0,
                     support=sig.support, holder=sig.holder,
                     mellin_derivative=theta)
    return sig


def cc_bump(radius: float = 2.0, height: float = 1.0) -> Signal:
    """Mollified indicator: the C-infinity bump exp(1 - 1/(1 - (v/R)^2))."""
    if radius <= 0:
        raise ValidationError("cc_bump needs radius > 0")

    def core(v):
        v = np.asarray(v, dtype=float)
        s = (v / radius) ** 2
        out = np.zeros_like(v)
        inside = s < 1.0
        out[inside] = height * np.exp(1.0 - 1.0 / (1.0 - s[inside]))
        return out

    def theta(x):
        v = np.log(np.asarray(x, dtype=float))
        s = (v / radius) ** 2
        out = np.zeros_like(v)
        inside = s < 1.0
        vi = v[inside]
        out[inside] = core(vi) * (-2.0 * vi / radius**2) / (1.0 - (vi / radius) ** 2) ** 2
        return out

    return Signal(
        name=f"cc_bump({radius:g},{height:g})",
        evaluate=lambda x: core(np.log(np.asarray(x, dtype=float))),
        sup_norm=abs(height),
        support=math.exp(radius),
        holder=(1.0, None),
        mellin_derivative=theta,
    )


def random_bump(seed: int) -> Signal:
    """Seeded random mix of dilated mollified bumps; compactly supported."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    heights = rng.uniform(-2.0, 2.0, size=n)
    centers = rng.uniform(-1.5, 1.5, size=n)
    radii = rng.uniform(0.5, 1.5, size=n)
    parts = [cc_bump(r, h) for r, h in zip(radii, heights)]

    def f(x):
        v = np.log(np.asarray(x, dtype=float))
        out = np.zeros_like(v)
        for p, c in zip(parts, centers):
            out += p.log_evaluate(v - c)
        return out

    r_log = float(np.max(np.abs(centers) + radii))
    return Signal(
        name=f"random_bump(seed={seed})",
        evaluate=lambda x: f(x),
        sup_norm=float(np.sum(np.abs(heights))),
        support=math.exp(r_log),
    )


_BUILDERS = {
    "constant": constant,
    "clipped_log": clipped_log,
    "power_clipped": power_clipped,
    "sin_log": sin_log,
    "holder_bump": holder_bump,
    "cc_bump": cc_bump,
    "random_bump": random_bump,
}


def make_signal(name: str, **params) -> Signal:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise ValidationError(f"unknown signal name {name!r}") from None
    return builder(**params)
