"""Domain types for exponential Kantorovich sampling: sampling schemes,
kernel profiles, nonlinear responses, signals and phi-function pairs.

Everything here is immutable after construction and safe to share across
workers.  Numerics live in the sibling modules; this one only evaluates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import backend


class ExpKantError(Exception):
    """Base error for the package."""


class ValidationError(ExpKantError):
    """Bad parameters or malformed configuration."""


class EvaluationError(ExpKantError):
    """Non-finite values or an empty retained index set during evaluation."""


class PreconditionError(ExpKantError):
    """A theorem hypothesis failed its numerical audit."""


# ---------------------------------------------------------------------------
# sampling schemes


@dataclass(frozen=True, eq=False)
class SamplingScheme:
    """Node sequence t_k with gaps bounded in [lower_gap, upper_gap].

    kind "uniform": t_k = offset + k*step.
    kind "tabulated": a strictly increasing base window (b_0, ..., b_{m-1})
    extended periodically with period P, t_{q*m+i} = q*P + b_i, so that
    infinite sums stay well defined with the same gap bounds.
    """

    kind: str
    step: float = 1.0
    offset: float = 0.0
    base: Optional[tuple] = None
    period: Optional[float] = None

    @staticmethod
    def uniform(step: float = 1.0, offset: float = 0.0) -> "SamplingScheme":
        if step <= 0:
            raise ValidationError("uniform scheme needs step > 0")
        return SamplingScheme(kind="uniform", step=float(step), offset=float(offset))

    @staticmethod
    def tabulated(base: Sequence[float], period: float) -> "SamplingScheme":
        b = tuple(float(v) for v in base)
        if len(b) < 1 or any(b[i + 1] <= b[i] for i in range(len(b) - 1)):
            raise ValidationError("tabulated base must be strictly increasing")
        if period <= b[-1] - b[0]:
            raise ValidationError("period must exceed the base window span")
        return SamplingScheme(kind="tabulated", base=b, period=float(period))

    @property
    def gaps(self) -> np.ndarray:
        if self.kind == "uniform":
            return np.array([self.step])
        b = np.asarray(self.base)
        internal = np.diff(b)
        wrap = self.period - (b[-1] - b[0])
        return np.append(internal, wrap)

    @property
    def lower_gap(self) -> float:
        return float(self.gaps.min())

    @property
    def upper_gap(self) -> float:
        return float(self.gaps.max())

    @property
    def phase_period(self) -> float:
        """Period of y -> (t_k - y) as a set; the moment sup reduces to it."""
        return self.step if self.kind == "uniform" else float(self.period)

    @property
    def is_unit_uniform(self) -> bool:
        return self.kind == "uniform" and self.step == 1.0 and self.offset == 0.0

    def node(self, k: int) -> float:
        if self.kind == "uniform":
            return self.offset + k * self.step
        m = len(self.base)
        q, i = divmod(k, m)
        return q * self.period + self.base[i]

    def nodes(self, k_lo: int, k_hi: int) -> np.ndarray:
        """t_k for k in [k_lo, k_hi] inclusive."""
        ks = np.arange(k_lo, k_hi + 1)
        if self.kind == "uniform":
            return self.offset + ks * self.step
        m = len(self.base)
        q, i = np.divmod(ks, m)
        return q * self.period + np.asarray(self.base)[i]

    def node_gaps(self, k_lo: int, k_hi: int) -> np.ndarray:
        """Delta_k = t_{k+1} - t_k for k in [k_lo, k_hi] inclusive."""
        if self.kind == "uniform":
            return np.full(k_hi - k_lo + 1, self.step)
        g = self.gaps
        return g[np.arange(k_lo, k_hi + 1) % len(self.base)]

    def index_range(self, lo: float, hi: float) -> tuple:
        """Smallest k-interval [k_lo, k_hi] containing every t_k in [lo, hi].

        Returns k_lo > k_hi when the interval contains no node.
        """
        if hi < lo:
            return (0, -1)
        if self.kind == "uniform":
            k_lo = math.ceil((lo - self.offset) / self.step - 1e-12)
            k_hi = math.floor((hi - self.offset) / self.step + 1e-12)
            return (k_lo, k_hi)
        m = len(self.base)
        q_lo = math.floor((lo - self.base[-1]) / self.period) - 1
        q_hi = math.ceil((hi - self.base[0]) / self.period) + 1
        ks = np.arange(q_lo * m, (q_hi + 1) * m)
        t = self.nodes(ks[0], ks[-1])
        inside = ks[(t >= lo - 1e-12) & (t <= hi + 1e-12)]
        if inside.size == 0:
            return (0, -1)
        return (int(inside[0]), int(inside[-1]))

    @property
    def cache_key(self) -> tuple:
        return (self.kind, self.step, self.offset, self.base, self.period)


# ---------------------------------------------------------------------------
# kernel profiles and responses


@dataclass(frozen=True, eq=False)
class KernelProfile:
    """The nonnegative factor L of a factorized kernel, viewed in the log
    variable: log_values(v) = L(e^v)."""

    name: str
    log_values: Callable[[np.ndarray], np.ndarray]
    l1_log_norm: float
    sup_bound: float
    support_radius: Optional[float] = None       # compact support in |v|
    decay_power: Optional[float] = None          # L(e^v) <= coeff * |v|**-p
    decay_coeff: Optional[float] = None
    decay_v0: float = 0.0
    fast_kind: Optional[int] = None              # backend dispatch for builtins
    fast_order: int = 0

    def evaluate(self, x) -> np.ndarray:
        return self.log_values(np.log(np.asarray(x, dtype=float)))

    @property
    def is_compact(self) -> bool:
        return self.support_radius is not None

    def effective_radius(self, eps: float = 1e-12) -> float:
        """Log radius beyond which individual profile values fall below eps."""
        if self.is_compact:
            return self.support_radius
        return (self.decay_coeff / eps) ** (1.0 / self.decay_power)

    def tail_term_bound(self, radius: float) -> float:
        """Upper bound on L(e^v) for |v| >= radius (0 for compact support)."""
        if self.is_compact:
            return 0.0 if radius >= self.support_radius else self.sup_bound
        if radius <= self.decay_v0:
            return self.sup_bound
        return self.decay_coeff * radius ** (-self.decay_power)


def make_builtin_profile(name: str, n: int = 2) -> KernelProfile:
    """Built-in profiles: bspline(n) and mellin_fejer.

    bspline(n) is the central B-spline of degree n (n >= 2), support radius
    (n+1)/2 in the log variable, partition of unity over integer shifts.
    mellin_fejer is (1/(2*pi)) (sin(v/2)/(v/2))^2, already of unit L1 norm
    along the log axis; its log-moments of order >= 1 diverge.
    """
    if name == "bspline":
        if n < 2:
            raise ValidationError("bspline profile needs order n >= 2")
        sup = float(backend.bspline_values(np.array([0.0]), n)[0])
        return KernelProfile(
            name=f"bspline({n})",
            log_values=lambda v, _n=n: backend.bspline_values(v, _n),
            l1_log_norm=1.0,
            sup_bound=sup,
            support_radius=0.5 * (n + 1),
            fast_kind=backend.KIND_BSPLINE,
            fast_order=n,
        )
    if name == "mellin_fejer":
        return KernelProfile(
            name="mellin_fejer",
            log_values=backend.fejer_values,
            l1_log_norm=1.0,
            sup_bound=1.0 / (2.0 * math.pi),
            decay_power=2.0,
            decay_coeff=2.0 / math.pi,
            decay_v0=0.0,
            fast_kind=backend.KIND_FEJER,
        )
    raise ValidationError(f"unknown profile name {name!r}")


@dataclass(frozen=True, eq=False)
class SlopeFunction:
    """The psi of the (L, psi)-Lipschitz condition: nondecreasing, psi(0)=0."""

    name: str
    evaluate: Callable[[np.ndarray], np.ndarray]
    concave: bool = True
    growth_exponent: Optional[float] = None      # psi(u) = O(u^q) as u -> 0+

    def __call__(self, u):
        return self.evaluate(np.asarray(u, dtype=float))


@dataclass(frozen=True, eq=False)
class ResponseFamily:
    """The family g_w with g_w(0) = 0 and g_w(u) -> u uniformly as w grows.

    deviation_rate is the alpha with sup_u |g_w(u) - u| = O(w^-alpha);
    None marks the exact identity family.
    """

    name: str
    evaluate: Callable[[float, np.ndarray], np.ndarray]
    lipschitz_slope: SlopeFunction
    deviation_rate: Optional[float] = None

    def __call__(self, w: float, u):
        return self.evaluate(w, np.asarray(u, dtype=float))


def identity_slope() -> SlopeFunction:
    return SlopeFunction("u", lambda u: u, concave=True, growth_exponent=1.0)


def make_response(name: str, alpha: float = 1.0, r: float = 1.0) -> ResponseFamily:
    """Built-in response families.

    identity: g_w(u) = u (the linear case).
    soft(alpha): g_w(u) = u + w^-alpha * tanh(u); slope psi(u) = 2u.
    soft_power(alpha, r): g_w(u) = u + w^-alpha * sign(u) * min(|u|^r, 1),
    with dominating slope psi(u) = 2 u^r for arguments below 1; used for
    runs that need psi(u) = u^r with r < 1.
    """
    if name == "identity":
        return ResponseFamily("identity", lambda w, u: u, identity_slope())
    if name == "soft":
        if alpha <= 0:
            raise ValidationError("soft response needs alpha > 0")
        return ResponseFamily(
            f"soft({alpha:g})",
            lambda w, u, _a=alpha: u + w ** (-_a) * np.tanh(u),
            SlopeFunction("2u", lambda u: 2.0 * u, concave=True, growth_exponent=1.0),
            deviation_rate=float(alpha),
        )
    if name == "soft_power":
        if alpha <= 0 or not (0.0 < r <= 1.0):
            raise ValidationError("soft_power needs alpha > 0 and r in (0, 1]")

        def _eval(w, u, _a=alpha, _r=r):
            return u + w ** (-_a) * np.sign(u) * np.minimum(np.abs(u) ** _r, 1.0)

        return ResponseFamily(
            f"soft_power({alpha:g},{r:g})",
            _eval,
            SlopeFunction(f"2u^{r:g}", lambda u, _r=r: 2.0 * u**_r,
                          concave=True, growth_exponent=float(r)),
            deviation_rate=float(alpha),
        )
    raise ValidationError(f"unknown response name {name!r}")


@dataclass(frozen=True, eq=False)
class NonlinearKernel:
    """Factorized nonlinear kernel chi(x, u) = L(x) * g_w(u).

    chi(x, 0) = 0 holds identically because g_w(0) = 0.
    """

    profile: KernelProfile
    response: ResponseFamily
    slope: SlopeFunction = None  # defaults to the response's slope

    def __post_init__(self):
        if self.slope is None:
            object.__setattr__(self, "slope", self.response.lipschitz_slope)

    def chi_log(self, w: float, v, u) -> np.ndarray:
        """chi at kernel argument e^v: L(e^v) * g_w(u)."""
        return self.profile.log_values(np.asarray(v, dtype=float)) * self.response(w, u)


# ---------------------------------------------------------------------------
# signals


@dataclass(frozen=True, eq=False)
class Signal:
    """A test function on R+ with declared regularity metadata.

    The library never infers regularity: theorems quantify over classes, so
    each experiment must know what the test function claims.
    """

    name: str
    evaluate: Callable[[np.ndarray], np.ndarray]
    sup_norm: Optional[float] = None
    support: Optional[float] = None              # support inside [1/r, r], r > 1
    holder: Optional[tuple] = None               # (nu, constant)
    mellin_derivative: Optional[Callable] = None  # theta f = x f'(x)
    log_growth: Optional[tuple] = None           # |f(e^v)| <= a + b|v|

    def __call__(self, x):
        return self.evaluate(np.asarray(x, dtype=float))

    def log_evaluate(self, v) -> np.ndarray:
        # exp overflow to inf is fine: x = inf is a legitimate query point
        # for saturating signals
        with np.errstate(over="ignore"):
            x = np.exp(np.asarray(v, dtype=float))
        return self.evaluate(x)

    @property
    def log_support_radius(self) -> Optional[float]:
        return math.log(self.support) if self.support is not None else None

    def dilate(self, factor: float) -> "Signal":
        """The dilated signal x -> f(x * factor), with metadata adjusted."""
        base = self
        shift = abs(math.log(factor))
        return Signal(
            name=f"{self.name}~dil({factor:g})",
            evaluate=lambda x: base.evaluate(np.asarray(x, dtype=float) * factor),
            sup_norm=self.sup_norm,
            support=(math.exp(self.log_support_radius + shift)
                     if self.support is not None else None),
            holder=self.holder,
            mellin_derivative=(
                (lambda x: base.mellin_derivative(np.asarray(x, dtype=float) * factor))
                if self.mellin_derivative is not None else None),
            log_growth=((self.log_growth[0] + self.log_growth[1] * shift,
                         self.log_growth[1])
                        if self.log_growth is not None else None),
        )


def difference_signal(f: Signal, g: Signal) -> Signal:
    sup = None
    if f.sup_norm is not None and g.sup_norm is not None:
        sup = f.sup_norm + g.sup_norm
    support = None
    if f.support is not None and g.support is not None:
        support = max(f.support, g.support)
    return Signal(
        name=f"({f.name})-({g.name})",
        evaluate=lambda x: f.evaluate(np.asarray(x, dtype=float))
        - g.evaluate(np.asarray(x, dtype=float)),
        sup_norm=sup,
        support=support,
    )


# ---------------------------------------------------------------------------
# phi-functions


@dataclass(frozen=True, eq=False)
class PhiFunction:
    """A phi-function: continuous, nondecreasing, phi(0)=0, unbounded."""

    name: str
    evaluate: Callable[[np.ndarray], np.ndarray]
    convex: bool = True

    def __call__(self, u):
        return self.evaluate(np.asarray(u, dtype=float))


@dataclass(frozen=True, eq=False)
class PhiPair:
    """A target phi together with its growth-condition companion eta and the
    lambda -> C_lambda map of the compatibility inequality
    phi(C_lambda * psi(u)) <= eta(lambda * u)."""

    phi: PhiFunction
    eta: PhiFunction
    c_lambda: Callable[[float], float]
