"""Log-discrete absolute moments and numerical audits of every kernel
admissibility condition the convergence theorems assume.

The moment sup is taken over the phase variable y = w ln x,
    M_beta(L) = sup_y sum_k L(e^{y - t_k}) |y - t_k|^beta,
which is periodic in y with the scheme's phase period and independent of w.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import backend
from .core import (KernelProfile, NonlinearKernel, SamplingScheme,
                   ValidationError)
from .ratefit import RateFit, fit_loglog

EXACT_SUP = 1e-12
_TAIL_WINDOW = 1e5


@dataclass(frozen=True)
class MomentReport:
    beta: float
    value: float
    probe_grid: str
    diverged: bool

    def to_dict(self) -> dict:
        return {"beta": self.beta, "value": self.value,
                "probe_grid": self.probe_grid, "diverged": self.diverged}


@dataclass(frozen=True)
class ConditionReport:
    condition: str
    params: dict
    w_values: tuple
    sup_values: tuple
    fitted_rate: Optional[float]
    passed: bool
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"condition": self.condition, "params": self.params,
                "w_values": list(self.w_values),
                "sup_values": list(self.sup_values),
                "fitted_rate": self.fitted_rate, "passed": self.passed,
                "extra": self.extra}


# ---------------------------------------------------------------------------
# phase sums


def _phase_sum(profile: KernelProfile, y: np.ndarray, t: np.ndarray,
               beta: float) -> np.ndarray:
    """sum_k L(e^{y_i - t_k}) |y_i - t_k|^beta over the retained window."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if profile.fast_kind is not None:
        return backend.phase_weighted_sum(y, t, beta, profile.fast_kind,
                                          profile.fast_order)
    out = np.empty(y.size)
    chunk = max(1, 4_000_000 // max(1, t.size))
    for lo in range(0, y.size, chunk):
        block = y[lo:lo + chunk, None] - t[None, :]
        vals = profile.log_values(block)
        if beta != 0.0:
            vals = vals * np.abs(block) ** beta
        out[lo:lo + chunk] = vals.sum(axis=1)
    return out


def _window_nodes(scheme: SamplingScheme, center: float, half: float) -> np.ndarray:
    k_lo, k_hi = scheme.index_range(center - half, center + half)
    if k_hi < k_lo:
        return np.empty(0)
    return scheme.nodes(k_lo, k_hi)


def _tail_remainder(profile: KernelProfile, scheme: SamplingScheme,
                    radius: float, beta: float) -> float:
    """Upper bound on sum over |y - t_k| > radius of L |.|^beta, by
    comparison with the decay envelope (nodes at least lower_gap apart)."""
    if profile.is_compact:
        return 0.0 if radius >= profile.support_radius else math.inf
    p, c = profile.decay_power, profile.decay_coeff
    if beta >= p - 1:
        return math.inf
    r0 = max(radius - scheme.upper_gap, profile.decay_v0, 1e-6)
    return 2.0 * c / scheme.lower_gap * r0 ** (beta + 1.0 - p) / (p - 1.0 - beta)


def _golden_refine(fun, a: float, b: float, iters: int = 40) -> float:
    """Golden-section search for the max of a scalar function on [a, b]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(iters):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
    return max(fc, fd)


def discrete_moment(profile: KernelProfile, scheme: SamplingScheme,
                    beta: float, w: float = 1.0,
                    probe_points: int = 2048) -> MomentReport:
    """Log-discrete absolute moment of order beta (w-independent in the
    phase variable; the w argument is accepted for interface symmetry).

    Decaying profiles with decay power p <= beta + 1 are flagged divergent
    immediately: their weighted terms are not summable.
    """
    if beta < 0:
        raise ValidationError("discrete_moment needs beta >= 0")
    period = scheme.phase_period
    desc = f"{probe_points} phase points on one period [0, {period:g})"
    if not profile.is_compact and profile.decay_power <= beta + 1.0:
        return MomentReport(beta, math.inf, desc, True)

    if profile.is_compact:
        half = profile.support_radius + scheme.upper_gap

        def sup_on(ys):
            t = _window_nodes(scheme, 0.5 * (ys[0] + ys[-1]),
                              half + 0.5 * (ys[-1] - ys[0]) + scheme.upper_gap)
            return _phase_sum(profile, ys, t, beta)

        ys = np.linspace(0.0, period, probe_points, endpoint=False)
        vals = sup_on(ys)
        i = int(np.argmax(vals))
        h = period / probe_points
        refined = _golden_refine(
            lambda y: float(sup_on(np.array([y]))[0]), ys[i] - h, ys[i] + h)
        value = max(float(vals.max()), refined)
        # one refinement pass: double the probe grid
        ys2 = np.linspace(0.0, period, 2 * probe_points, endpoint=False)
        value = max(value, float(sup_on(ys2).max()))
        return MomentReport(beta, value, desc, False)

    # decaying profile with finite moment: grow the window geometrically
    # and add the analytic tail envelope so the value is an upper bound
    ys = np.linspace(0.0, period, probe_points, endpoint=False)
    half = 64.0
    history = []
    for _ in range(7):
        t = _window_nodes(scheme, 0.5 * period, half)
        vals = _phase_sum(profile, ys, t, beta)
        history.append(float(vals.max()))
        half *= 2.0
    diverged = history[-2] > 0 and history[-1] / history[-2] > 1.1
    value = history[-1] + _tail_remainder(profile, scheme, half / 2.0, beta)
    return MomentReport(beta, value, desc, diverged)


_MOMENT_CACHE: dict = {}


def moment_value(profile: KernelProfile, scheme: SamplingScheme,
                 beta: float) -> float:
    """Cached moment lookup; inf when the moment diverges."""
    key = (id(profile), scheme.cache_key, beta)
    if key not in _MOMENT_CACHE:
        rep = discrete_moment(profile, scheme, beta)
        # keep a reference to the profile: id() keys are only unique while
        # the object is alive
        _MOMENT_CACHE[key] = (profile,
                              math.inf if rep.diverged else rep.value)
    return _MOMENT_CACHE[key][1]


def tail_sum(profile: KernelProfile, scheme: SamplingScheme, gamma: float,
             w: float, x: float) -> float:
    """sum over |t_k - w ln x| > gamma w of L(e^{-t_k} x^w), as an upper
    bound (partial sum plus decay-envelope remainder)."""
    if gamma <= 0 or w <= 0 or x <= 0:
        raise ValidationError("tail_sum needs gamma, w, x > 0")
    y = w * math.log(x)
    h = gamma * w
    if profile.is_compact:
        if h >= profile.support_radius:
            return 0.0
        outer = profile.support_radius + scheme.upper_gap
    else:
        outer = h + _TAIL_WINDOW
    total = 0.0
    for lo, hi in ((y - outer, y - h), (y + h, y + outer)):
        k_lo, k_hi = scheme.index_range(lo, hi)
        if k_hi < k_lo:
            continue
        t = scheme.nodes(k_lo, k_hi)
        keep = np.abs(t - y) > h
        if keep.any():
            total += float(_phase_sum(profile, np.array([y]), t[keep], 0.0)[0])
    total += _tail_remainder(profile, scheme, outer, 0.0)
    return total


# ---------------------------------------------------------------------------
# partition sums m0 and the (chi4) functionals


def partition_bounds(profile: KernelProfile, scheme: SamplingScheme,
                     phase_points: int = 512) -> tuple:
    """(min, max) over the phase of m0(y) = sum_k L(e^{y - t_k}), the max
    including the truncation remainder so it is a true upper bound."""
    period = scheme.phase_period
    ys = np.linspace(0.0, period, phase_points, endpoint=False)
    if profile.is_compact:
        half = profile.support_radius + period + scheme.upper_gap
        rem = 0.0
    else:
        half = 2e4
        rem = _tail_remainder(profile, scheme, half - period, 0.0)
    t = _window_nodes(scheme, 0.5 * period, half)
    m0 = _phase_sum(profile, ys, t, 0.0)
    return float(m0.min()), float(m0.max()) + rem


def _signed_logspace(lo: float, hi: float, n: int) -> np.ndarray:
    g = np.geomspace(lo, hi, n)
    return np.concatenate([-g[::-1], g])


def _chi4_passed(sups: np.ndarray, fit: Optional[RateFit],
                 alpha: Optional[float]) -> bool:
    if np.all(sups < EXACT_SUP):
        return True
    if alpha is None or fit is None:
        return False
    return fit.slope <= -alpha + 0.1


def _sup_functional(kernel: NonlinearKernel, m0_lo: float, m0_hi: float,
                    w: float, u: np.ndarray, relative: bool) -> float:
    """sup over u and m0 in [m0_lo, m0_hi] of |g_w(u) m0 - u| (absolute) or
    |g_w(u) m0 / u - 1| (relative).  Linear in m0, so endpoints suffice."""
    g = kernel.response(w, u)
    best = 0.0
    for m0 in (m0_lo, m0_hi):
        d = g * m0 - u
        if relative:
            d = d / u
        best = max(best, float(np.max(np.abs(d))))
    return best


def chi4_functionals(kernel: NonlinearKernel, scheme: SamplingScheme, j: int,
                     w_list: Sequence[float], phase_points: int = 512):
    """Raw values of the two (chi4) functionals per w: the small-u sup S
    and the large-u relative sup T, both over the phase and u grids."""
    if j < 1:
        raise ValidationError("chi4 functionals need j >= 1")
    w_arr = np.asarray(sorted(w_list), dtype=float)
    m0_lo, m0_hi = partition_bounds(kernel.profile, scheme, phase_points)
    u_small = np.concatenate([[0.0], _signed_logspace(1e-8, (1.0 / j) * (1 - 1e-12), 41)])
    u_large = _signed_logspace(1.0 / j, 1e3, 61)
    s_vals = np.array([_sup_functional(kernel, m0_lo, m0_hi, w, u_small, False)
                       for w in w_arr])
    t_vals = np.array([_sup_functional(kernel, m0_lo, m0_hi, w, u_large, True)
                       for w in w_arr])
    return w_arr, s_vals, t_vals, (m0_lo, m0_hi)


def check_chi4(kernel: NonlinearKernel, scheme: SamplingScheme, j: int,
               w_list: Sequence[float], phase_points: int = 512):
    """The small-u and large-u functionals of condition (chi4); returns a
    pair of ConditionReports (S first, T second)."""
    w_arr, s_vals, t_vals, (m0_lo, m0_hi) = chi4_functionals(
        kernel, scheme, j, w_list, phase_points)
    alpha = kernel.response.deviation_rate
    reports = []
    for name, vals in (("chi4_S", s_vals), ("chi4_T", t_vals)):
        fit = fit_loglog(w_arr, vals)
        reports.append(ConditionReport(
            condition=name, params={"j": j, "alpha_declared": alpha},
            w_values=tuple(w_arr), sup_values=tuple(vals),
            fitted_rate=None if fit is None else fit.slope,
            passed=_chi4_passed(vals, fit, alpha),
            extra={"m0_range": [m0_lo, m0_hi]}))
    return reports[0], reports[1]


def check_chi4_star(kernel: NonlinearKernel, scheme: SamplingScheme,
                    w_list: Sequence[float], phase_points: int = 512,
                    u_grid: Optional[np.ndarray] = None) -> ConditionReport:
    """Condition (chi4*): sup over u != 0 of |(1/u) sum_k chi(., u) - 1|."""
    w_arr = np.asarray(sorted(w_list), dtype=float)
    m0_lo, m0_hi = partition_bounds(kernel.profile, scheme, phase_points)
    if u_grid is None:
        u_grid = _signed_logspace(1e-8, 1e3, 101)
    alpha = kernel.response.deviation_rate
    vals = np.array([_sup_functional(kernel, m0_lo, m0_hi, w, u_grid, True)
                     for w in w_arr])
    fit = fit_loglog(w_arr, vals)
    return ConditionReport(
        condition="chi4_star", params={"alpha_declared": alpha},
        w_values=tuple(w_arr), sup_values=tuple(vals),
        fitted_rate=None if fit is None else fit.slope,
        passed=_chi4_passed(vals, fit, alpha),
        extra={"m0_range": [m0_lo, m0_hi]})


def check_L3(profile: KernelProfile, scheme: SamplingScheme, r: float,
             gamma: float, w_list: Sequence[float],
             phase_points: int = 128) -> ConditionReport:
    """Condition (L3): weighted tails beyond |t_k - w ln x| > gamma w must
    vanish as w grows."""
    if not (0.0 < r <= 1.0) or gamma <= 0:
        raise ValidationError("check_L3 needs r in (0,1] and gamma > 0")
    w_arr = np.asarray(sorted(w_list), dtype=float)
    period = scheme.phase_period
    ys = np.linspace(0.0, period, phase_points, endpoint=False)
    diverged = (not profile.is_compact) and profile.decay_power <= r + 1.0
    vals = []
    for w in w_arr:
        h = gamma * w
        if profile.is_compact:
            if h >= profile.support_radius:
                vals.append(0.0)
                continue
            outer = profile.support_radius + scheme.upper_gap
        else:
            outer = h + _TAIL_WINDOW
        per_y = []
        for y in ys:
            total = 0.0
            for lo, hi in ((y - outer, y - h), (y + h, y + outer)):
                k_lo, k_hi = scheme.index_range(lo, hi)
                if k_hi < k_lo:
                    continue
                t = scheme.nodes(k_lo, k_hi)
                keep = np.abs(t - y) > h
                if keep.any():
                    total += float(_phase_sum(profile, np.array([y]),
                                              t[keep], r)[0])
            per_y.append(total)
        rem = _tail_remainder(profile, scheme, outer, r)
        vals.append(max(per_y) + (rem if math.isfinite(rem) else 0.0))
    vals = np.array(vals)
    if diverged:
        passed = False
    else:
        exact = np.all(vals[w_arr * gamma >= (profile.support_radius or math.inf)]
                       == 0.0) and profile.is_compact
        nonincreasing = np.all(np.diff(vals) <= 1e-15)
        passed = (profile.is_compact and np.any(vals == 0.0) and exact) or (
            nonincreasing and vals[-1] < 1e-8)
    fit = fit_loglog(w_arr, vals)
    return ConditionReport(
        condition="L3", params={"r": r, "gamma": gamma},
        w_values=tuple(w_arr), sup_values=tuple(vals),
        fitted_rate=None if fit is None else fit.slope,
        passed=bool(passed), extra={"diverged": diverged})


# ---------------------------------------------------------------------------
# the integral tail condition of the quantitative modular estimate


def _log_tail_integral(profile: KernelProfile, threshold: float) -> float:
    """integral over |v| > threshold of L(e^v) dv (two-sided)."""
    if profile.is_compact:
        hi = profile.support_radius
        if threshold >= hi:
            return 0.0
    else:
        hi = max(1e4, 100.0 * threshold)
    nodes, weights = np.polynomial.legendre.leggauss(8)
    # panels narrow enough to resolve oscillatory profiles
    n_panels = max(8, int(math.ceil((hi - threshold) / 0.5)))
    edges = np.linspace(threshold, hi, n_panels + 1)
    a, b = edges[:-1], edges[1:]
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    v = mid[:, None] + half[:, None] * nodes[None, :]
    total = float(np.sum((profile.log_values(v) + profile.log_values(-v))
                         * (half[:, None] * weights[None, :])))
    if not profile.is_compact:
        p, c = profile.decay_power, profile.decay_coeff
        total += 2.0 * c * hi ** (1.0 - p) / (p - 1.0)
    return total


def check_e3_1(profile: KernelProfile, gamma: float,
               w_list: Sequence[float]) -> ConditionReport:
    """Tail-mass condition: w * integral over |ln y| > w^-gamma of L(y^w)
    equals the log-tail integral beyond w^{1-gamma}; fits (M_3, gamma_0)."""
    if not (0.0 < gamma < 1.0):
        raise ValidationError("check_e3_1 needs gamma in (0, 1)")
    w_arr = np.asarray(sorted(w_list), dtype=float)
    vals = np.array([_log_tail_integral(profile, w ** (1.0 - gamma))
                     for w in w_arr])
    exact_zero = bool(np.all(vals < 1e-15))
    fit = fit_loglog(w_arr, vals)
    extra = {"exact_zero": exact_zero}
    if fit is not None:
        extra["M3"] = math.exp(fit.intercept)
        extra["gamma0"] = -fit.slope
    elif exact_zero:
        extra["gamma0"] = math.inf
    passed = exact_zero or (fit is not None and fit.slope < 0)
    return ConditionReport(
        condition="e3_1", params={"gamma": gamma},
        w_values=tuple(w_arr), sup_values=tuple(vals),
        fitted_rate=None if fit is None else fit.slope,
        passed=passed, extra=extra)
