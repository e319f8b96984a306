"""Log-modulus of continuity: grid-based sup estimation over pairs with
|ln x - ln y| <= delta, plus the log-Holder order fit.

Estimates are lower bounds of the true sup (the acceptance signals have
analytically known moduli, so the bias is measurable); refining the search
grid never decreases the value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import Signal, ValidationError
from .ratefit import fit_loglog

ZERO_MODULUS = 1e-14


@dataclass(frozen=True)
class ModulusCurve:
    deltas: tuple
    values: tuple
    fitted_order: Optional[float] = None

    @property
    def is_zero(self) -> bool:
        return all(v < ZERO_MODULUS for v in self.values)

    def to_dict(self) -> dict:
        return {"deltas": list(self.deltas), "values": list(self.values),
                "fitted_order": self.fitted_order, "is_zero": self.is_zero}


def _search_window(f: Signal, delta: float) -> tuple:
    if f.log_support_radius is not None:
        r = f.log_support_radius + delta
        return (-r, r)
    return (-8.0, 8.0)


def log_modulus(f: Signal, delta: float, window: Optional[tuple] = None,
                anchors: int = 513, offsets: int = 65) -> float:
    """Lower-bound estimate of sup |f(x) - f(y)| over |ln x - ln y| <= delta.

    Anchor points on a log grid, offset sweep in [-delta, delta], then one
    local refinement pass around the best pair.
    """
    if delta <= 0:
        raise ValidationError("log_modulus needs delta > 0")
    if window is None:
        window = _search_window(f, delta)
    if window[1] <= window[0]:
        raise ValidationError("empty search window")
    v = np.linspace(window[0], window[1], anchors)
    h = np.linspace(-delta, delta, offsets)
    fv = f.log_evaluate(v)
    best = 0.0
    bi = bj = 0
    for j, hj in enumerate(h):
        diff = np.abs(f.log_evaluate(v + hj) - fv)
        i = int(np.argmax(diff))
        if diff[i] > best:
            best, bi, bj = float(diff[i]), i, j
    # local refinement around the best (anchor, offset) pair
    dv = (window[1] - window[0]) / (anchors - 1)
    v2 = np.linspace(v[bi] - dv, v[bi] + dv, 41)
    dh = 2.0 * delta / (offsets - 1)
    h2 = np.clip(np.linspace(h[bj] - dh, h[bj] + dh, 21), -delta, delta)
    f2 = f.log_evaluate(v2)
    for hj in h2:
        diff = np.abs(f.log_evaluate(v2 + hj) - f2)
        best = max(best, float(diff.max()))
    return best


def subadditivity_check(f: Signal, delta: float, lam: float,
                        slack: float = 1e-6) -> bool:
    """omega(f, lam*delta) <= (1 + lam) * omega(f, delta), on estimates."""
    lhs = log_modulus(f, lam * delta)
    rhs = (1.0 + lam) * log_modulus(f, delta)
    return lhs <= rhs + slack


def modulus_curve(f: Signal, deltas: Sequence[float], **kwargs) -> ModulusCurve:
    ds = sorted((float(d) for d in deltas), reverse=True)
    values = tuple(log_modulus(f, d, **kwargs) for d in ds)
    curve = ModulusCurve(tuple(ds), values)
    return ModulusCurve(curve.deltas, curve.values, holder_fit(curve))


def holder_fit(curve: ModulusCurve) -> Optional[float]:
    """Log-Holder order: log-log slope of the modulus curve, clipped to
    (0, 1].  None marks the zero-modulus case."""
    if curve.is_zero:
        return None
    fit = fit_loglog(1.0 / np.asarray(curve.deltas), np.asarray(curve.values))
    if fit is None:
        return None
    return float(min(1.0, max(1e-12, -fit.slope)))
