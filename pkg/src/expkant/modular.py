"""Mellin-Orlicz machinery: modular functionals with respect to the
logarithmic measure, the growth-compatibility condition linking phi, the
kernel slope and a companion eta, the log-modulus of smoothness, and the
modular Lipschitz-class fit.

All integrals are taken in the log variable v = ln x, where the measure
dx/x becomes dv.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from . import moments, operator
from .core import (NonlinearKernel, PhiFunction, PhiPair, SamplingScheme,
                   Signal, SlopeFunction, ValidationError, difference_signal)
from .operator import GridFunction, QuadratureSpec, eval_on_log_grid
from .ratefit import fit_loglog


# ---------------------------------------------------------------------------
# phi-function registry


def phi_power(p: float) -> PhiFunction:
    """u^p; the Mellin-Lebesgue case for p >= 1."""
    if p < 1:
        raise ValidationError("phi_power needs p >= 1 for convexity")
    return PhiFunction(f"u^{p:g}", lambda u: np.abs(u) ** p, convex=True)


def phi_power_log(p: float) -> PhiFunction:
    """u^p * (1 + |ln u|) for u > 0 (continuously 0 at 0)."""
    if p < 1:
        raise ValidationError("phi_power_log needs p >= 1")

    def f(u):
        u = np.abs(np.asarray(u, dtype=float))
        out = np.zeros_like(u)
        pos = u > 0
        out[pos] = u[pos] ** p * (1.0 + np.abs(np.log(u[pos])))
        return out

    return PhiFunction(f"u^{p:g}(1+|ln u|)", f, convex=False)


def phi_exponential() -> PhiFunction:
    """e^u - 1; can overflow on operator-error tails, hence opt-in."""
    return PhiFunction("e^u-1", lambda u: np.expm1(np.abs(u)), convex=True)


def make_phi(name: str, p: float = 2.0,
             allow_exponential: bool = False) -> PhiFunction:
    if name == "power":
        return phi_power(p)
    if name == "power_log":
        return phi_power_log(p)
    if name == "exponential":
        if not allow_exponential:
            raise ValidationError(
                "exponential phi-functions are opt-in (allow_exponential=True)")
        return phi_exponential()
    raise ValidationError(f"unknown phi-function {name!r}")


def power_pair(p: float, q: float = 1.0) -> PhiPair:
    """phi = u^p with companion eta = u^{pq} and C_lambda = lambda^q,
    matching a slope psi(u) = u^q with equality in the growth condition."""
    return PhiPair(phi=phi_power(p), eta=phi_power(p * q),
                   c_lambda=lambda lam, _q=q: lam ** _q)


def matched_pair(p: float, slope: SlopeFunction) -> PhiPair:
    """power_pair(p, q) with C_lambda rescaled so the growth condition
    holds for slopes psi(u) = s * u^q with s >= 1: C_lambda = lambda^q / s,
    where s is measured as sup psi(u) / u^q over a log grid."""
    q = slope.growth_exponent
    if q is None:
        raise ValidationError("matched_pair needs a slope with a declared "
                              "growth exponent")
    u = np.geomspace(1e-6, 1e3, 181)
    s = float(np.max(np.asarray(slope(u), dtype=float) / u**q))
    s = max(s, 1.0)
    return PhiPair(phi=phi_power(p), eta=phi_power(p * q),
                   c_lambda=lambda lam, _q=q, _s=s: lam ** _q / _s)


# ---------------------------------------------------------------------------
# modular functionals


@dataclass(frozen=True)
class ModularValue:
    lam: float
    value: float
    quadrature_error: float
    diverged: bool = False

    def to_dict(self) -> dict:
        return {"lambda": self.lam, "value": self.value,
                "quadrature_error": self.quadrature_error,
                "diverged": self.diverged}


_GAUSS_CACHE: dict = {}


def _panel_integrate(fun: Callable[[np.ndarray], np.ndarray], lo: float,
                     hi: float, panels: int, nodes: int = 8) -> float:
    if nodes not in _GAUSS_CACHE:
        _GAUSS_CACHE[nodes] = np.polynomial.legendre.leggauss(nodes)
    xg, wg = _GAUSS_CACHE[nodes]
    edges = np.linspace(lo, hi, panels + 1)
    a, b = edges[:-1], edges[1:]
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    v = mid[:, None] + half[:, None] * xg[None, :]
    return float(np.sum(fun(v) * (half[:, None] * wg[None, :])))


def _adaptive_integral(fun, lo: float, hi: float, rel_tol: float = 1e-8,
                       start_panels: int = 64, max_doublings: int = 6):
    prev = _panel_integrate(fun, lo, hi, start_panels)
    panels = start_panels
    err = math.inf
    for _ in range(max_doublings):
        panels *= 2
        cur = _panel_integrate(fun, lo, hi, panels)
        err = abs(cur - prev)
        if err <= rel_tol * max(1.0, abs(cur)):
            return cur, err
        prev = cur
    return prev, err


def modular(phi: PhiFunction, f: Signal, lam: float,
            window: Optional[tuple] = None, rel_tol: float = 1e-8) -> ModularValue:
    """I_phi[lam f] = integral of phi(lam |f(e^v)|) dv.

    For signals without compact support the window is extended until the
    added tail mass is negligible; a non-decaying tail sets the diverged
    flag instead of silently truncating.
    """
    if lam <= 0:
        raise ValidationError("modular needs lambda > 0")

    def integrand(v):
        return phi(lam * np.abs(f.log_evaluate(v)))

    if window is not None:
        lo, hi = window
        value, err = _adaptive_integral(integrand, lo, hi, rel_tol)
        return ModularValue(lam, value, err)
    if f.log_support_radius is not None:
        r = f.log_support_radius
        value, err = _adaptive_integral(integrand, -r, r, rel_tol)
        return ModularValue(lam, value, err)
    # unbounded support: grow the window and watch the tail panels decay
    value, err = _adaptive_integral(integrand, -30.0, 30.0, rel_tol)
    tail = (_panel_integrate(integrand, 30.0, 60.0, 256)
            + _panel_integrate(integrand, -60.0, -30.0, 256))
    diverged = tail > max(rel_tol * max(1.0, value), 1e-12)
    return ModularValue(lam, value + tail, max(err, tail), diverged)


# package-level alias: `modular` would shadow this submodule there
modular_value = modular

LogEvaluable = Union[Signal, GridFunction]


def _union_window(f: LogEvaluable, g: LogEvaluable, default: float = 8.0) -> tuple:
    los, his = [], []
    for h in (f, g):
        if isinstance(h, GridFunction):
            los.append(float(h.v[0]))
            his.append(float(h.v[-1]))
        elif h.log_support_radius is not None:
            los.append(-h.log_support_radius)
            his.append(h.log_support_radius)
        else:
            los.append(-default)
            his.append(default)
    return (min(los), max(his))


def modular_error(phi: PhiFunction, f: LogEvaluable, g: LogEvaluable,
                  lam: float, window: Optional[tuple] = None,
                  n_points: int = 8192) -> ModularValue:
    """I_phi[lam (g - f)] on a dense log grid (trapezoid; the grid is
    doubled once to estimate the quadrature error).

    Operator values enter as GridFunctions (piecewise-linear interpolants),
    since re-evaluating the series inside an adaptive rule dominates cost.
    """
    if lam <= 0:
        raise ValidationError("modular_error needs lambda > 0")
    if window is None:
        window = _union_window(f, g)

    def integrand(v):
        return phi(lam * np.abs(g.log_evaluate(v) - f.log_evaluate(v)))

    v1 = np.linspace(window[0], window[1], n_points)
    v2 = np.linspace(window[0], window[1], 2 * n_points)
    i1 = float(np.trapezoid(integrand(v1), v1))
    i2 = float(np.trapezoid(integrand(v2), v2))
    return ModularValue(lam, i2, abs(i2 - i1))


# ---------------------------------------------------------------------------
# growth condition and the modular Lipschitz inequality


@dataclass(frozen=True)
class ConditionHReport:
    passed: bool
    worst_margin: float          # max of phi(C_lam psi(u)) - eta(lam u)
    worst_at: tuple              # (lambda, u)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "worst_margin": self.worst_margin,
                "worst_at": list(self.worst_at)}


def check_H(pair: PhiPair, slope: SlopeFunction,
            lambda_grid: Sequence[float] = (0.1, 0.25, 0.5, 0.75, 0.9),
            u_grid: Optional[np.ndarray] = None,
            slack: float = 1e-9) -> ConditionHReport:
    """Pointwise check of phi(C_lambda psi(u)) <= eta(lambda u) on grids."""
    if u_grid is None:
        u_grid = np.concatenate([[0.0], np.geomspace(1e-6, 1e3, 181)])
    worst = -math.inf
    at = (math.nan, math.nan)
    for lam in lambda_grid:
        c = pair.c_lambda(lam)
        lhs = pair.phi(c * slope(u_grid))
        rhs = pair.eta(lam * u_grid)
        margin = lhs - rhs
        i = int(np.argmax(margin))
        if margin[i] > worst:
            worst = float(margin[i])
            at = (float(lam), float(u_grid[i]))
    scale = max(1.0, abs(worst))
    return ConditionHReport(worst <= slack * scale, worst, at)


@dataclass(frozen=True)
class ModularLipschitzReport:
    lhs: float
    rhs: float
    lam: float
    c: float
    passed: bool

    def to_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "lambda": self.lam,
                "c": self.c, "passed": self.passed}


def modular_lipschitz_check(kernel: NonlinearKernel, scheme: SamplingScheme,
                            pair: PhiPair, f: Signal, g: Signal, w: float,
                            lam: float = 0.5,
                            quad: QuadratureSpec = QuadratureSpec(),
                            rel_slack: float = 1e-3) -> ModularLipschitzReport:
    """The modular inequality between operator outputs:
    I_phi[c (K_w f - K_w g)] <= (||L||_1 / (delta M_0)) I_eta[lam (f - g)]
    with c = C_lambda / M_0, both sides by quadrature."""
    if not (0.0 < lam < 1.0):
        raise ValidationError("modular_lipschitz_check needs lambda in (0,1)")
    m0 = moments.moment_value(kernel.profile, scheme, 0.0)
    c = pair.c_lambda(lam) / m0
    kf = eval_on_log_grid(f, w, kernel, scheme, quad)
    kg = eval_on_log_grid(g, w, kernel, scheme, quad)
    lhs = modular_error(pair.phi, kg, kf, c).value
    rhs_mod = modular(pair.eta, difference_signal(f, g), lam).value
    rhs = kernel.profile.l1_log_norm / (scheme.lower_gap * m0) * rhs_mod
    return ModularLipschitzReport(lhs, rhs, lam, c,
                                  lhs <= rhs * (1.0 + rel_slack) + 1e-15)


# ---------------------------------------------------------------------------
# log-modulus of smoothness and Lipschitz classes


@dataclass(frozen=True)
class SmoothnessCurve:
    deltas: tuple
    values: tuple
    lam: float
    fitted_order: Optional[float] = None

    @property
    def is_zero(self) -> bool:
        return all(v < 1e-14 for v in self.values)

    def to_dict(self) -> dict:
        return {"deltas": list(self.deltas), "values": list(self.values),
                "lambda": self.lam, "fitted_order": self.fitted_order,
                "is_zero": self.is_zero}


def log_smoothness(phi: PhiFunction, f: Signal, lam: float, delta: float,
                   t_points: int = 17, n_points: int = 8192) -> float:
    """sup over dilations |ln t| <= delta of I_phi[lam (f(. t) - f(.))]."""
    if delta <= 0:
        raise ValidationError("log_smoothness needs delta > 0")
    r = (f.log_support_radius if f.log_support_radius is not None else 8.0)
    v = np.linspace(-(r + delta), r + delta, n_points)
    fv = f.log_evaluate(v)
    best = 0.0
    for h in np.linspace(-delta, delta, t_points):
        diff = phi(lam * np.abs(f.log_evaluate(v + h) - fv))
        best = max(best, float(np.trapezoid(diff, v)))
    return best


def smoothness_curve(phi: PhiFunction, f: Signal, lam: float,
                     deltas: Sequence[float], **kwargs) -> SmoothnessCurve:
    ds = sorted((float(d) for d in deltas), reverse=True)
    values = tuple(log_smoothness(phi, f, lam, d, **kwargs) for d in ds)
    curve = SmoothnessCurve(tuple(ds), values, lam)
    return SmoothnessCurve(curve.deltas, curve.values, lam,
                           lip_class_fit(curve))


def lip_class_fit(curve: SmoothnessCurve) -> Optional[float]:
    """Lipschitz-class order from the smoothness curve, clipped to (0, 1]."""
    if curve.is_zero:
        return None
    fit = fit_loglog(1.0 / np.asarray(curve.deltas), np.asarray(curve.values))
    if fit is None:
        return None
    return float(min(1.0, max(1e-12, -fit.slope)))
