"""The proximity-operator catalog.

Two layers:

* scalar kinds -- one class per closed-form or root-solved scalar convex
  function, each exposing ``value(t)`` and ``prox(t, gamma)`` with the prox
  taken at an arbitrary positive scale;
* calculus combinators -- constructors that build new ``ProxFn`` values out
  of existing ones (translation, argument scaling, reflection, quadratic
  perturbation, conjugation, Moreau envelope/complement, squared distance,
  orthonormal decomposition, semi-orthogonal composition, quadratic losses,
  distance penalties, support functions and radial thresholding).

Implicit prox equations are solved on the optimality residual
r(p) = p - t + gamma*phi'(p), which is strictly increasing with slope >= 1
wherever phi is differentiable, so a bracketed root is located to the same
absolute accuracy as the residual tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    Array,
    InvalidParameterError,
    LinearMap,
    PreconditionError,
    ProxFn,
    as_vector,
)
from .scalar import Bracket, BracketingError, lambert_w_exp, solve_monotone

__all__ = [
    "ScalarKind",
    "Interval",
    "IntervalSupport",
    "SmoothPlusSupport",
    "Deadzone",
    "PowerAbs",
    "Huber",
    "AbsQuadPower",
    "AbsMinusLog",
    "LinearNonneg",
    "NegRoot",
    "InversePower",
    "Entropy",
    "LogThreshold",
    "LogQuadratic",
    "LogInverse",
    "LogPower",
    "IntervalLogBarrier",
    "SCALAR_KINDS",
    "scalar_prox",
    "separable",
    "basis_separable",
    "weighted_l1",
    "zero_fn",
    "quadratic_deviation",
    "scaled",
    "translated",
    "arg_scaled",
    "reflected",
    "quad_perturbed",
    "conjugate",
    "moreau_envelope",
    "moreau_complement",
    "squared_distance",
    "tight_frame_compose",
    "quadratic",
    "scaled_distance",
    "distance_penalty",
    "support_function",
    "support_plus_radial",
    "stacked",
]

_ROOT_TOL = 1e-14
# absolute slack on domain boundaries, matching the sets membership tolerance:
# proxes composed with orthonormal transforms land within rounding of the
# boundary, and evaluation must not report +inf there
_DOMAIN_SLACK = 1e-9


def _pow(base: float, expo: float) -> float:
    """base**expo that saturates to +inf instead of raising OverflowError."""
    try:
        return base**expo
    except OverflowError:
        return math.inf


def _solve_residual(r, lo: float, hi: float) -> float:
    return solve_monotone(r, Bracket(lo, hi), tol=_ROOT_TOL)


def _shrink_lo(r, hi: float) -> float:
    """Find lo in (0, hi) with r(lo) < 0 for residuals diverging to -inf at 0+."""
    lo = min(1.0, 0.5 * hi)
    for _ in range(80):
        if r(lo) < 0.0:
            return lo
        lo *= 1e-6
    raise BracketingError("could not bracket the prox equation near 0")


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise InvalidParameterError(msg)


class ScalarKind:
    """One scalar convex function phi with its proximity map.

    ``prox(t, gamma)`` returns the minimizer of gamma*phi(p) + 0.5*(t - p)^2.
    """

    def value(self, t: float) -> float:
        raise NotImplementedError

    def prox(self, t: float, gamma: float = 1.0) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class Interval(ScalarKind):
    """Indicator of [lo, hi]; prox is the clamp, independent of the scale."""

    lo: float = -math.inf
    hi: float = math.inf

    def __post_init__(self):
        _require(not math.isnan(self.lo) and not math.isnan(self.hi), "bounds must not be NaN")
        _require(self.lo < self.hi, f"interval needs lo < hi, got [{self.lo}, {self.hi}]")

    def value(self, t: float) -> float:
        return 0.0 if self.lo - _DOMAIN_SLACK <= t <= self.hi + _DOMAIN_SLACK else math.inf

    def prox(self, t: float, gamma: float = 1.0) -> float:
        return min(max(t, self.lo), self.hi)


@dataclass(frozen=True)
class IntervalSupport(ScalarKind):
    """Support function of [lo, hi]: max(lo*t, hi*t); prox is soft thresholding
    between the scaled endpoints."""

    lo: float
    hi: float

    def __post_init__(self):
        _require(math.isfinite(self.lo) and math.isfinite(self.hi), "endpoints must be finite")
        _require(self.lo < self.hi, f"support interval needs lo < hi, got [{self.lo}, {self.hi}]")

    def value(self, t: float) -> float:
        return max(self.lo * t, self.hi * t)

    def prox(self, t: float, gamma: float = 1.0) -> float:
        a, b = gamma * self.lo, gamma * self.hi
        if t < a:
            return t - a
        if t > b:
            return t - b
        return 0.0


@dataclass(frozen=True)
class SmoothPlusSupport(ScalarKind):
    """psi + support of [lo, hi] for psi differentiable at 0 with psi'(0) = 0;
    prox chains the soft threshold into the prox of psi."""

    psi: ScalarKind
    lo: float
    hi: float

    def __post_init__(self):
        _require(isinstance(self.psi, ScalarKind), "psi must be a ScalarKind")
        _require(math.isfinite(self.lo) and math.isfinite(self.hi), "endpoints must be finite")
        _require(self.lo < self.hi, f"support interval needs lo < hi, got [{self.lo}, {self.hi}]")

    def value(self, t: float) -> float:
        return self.psi.value(t) + max(self.lo * t, self.hi * t)

    def prox(self, t: float, gamma: float = 1.0) -> float:
        a, b = gamma * self.lo, gamma * self.hi
        softened = t - a if t < a else (t - b if t > b else 0.0)
        return self.psi.prox(softened, gamma)


@dataclass(frozen=True)
class Deadzone(ScalarKind):
    """max(|t| - omega, 0): flat inside [-omega, omega], unit slope outside."""

    omega: float

    def __post_init__(self):
        _require(math.isfinite(self.omega) and self.omega > 0, "omega must be > 0")

    def value(self, t: float) -> float:
        return max(abs(t) - self.omega, 0.0)

    def prox(self, t: float, gamma: float = 1.0) -> float:
        a = abs(t)
        if a <= self.omega:
            p = a
        elif a <= self.omega + gamma:
            p = self.omega
        else:
            p = a - gamma
        return math.copysign(p, t) if t != 0.0 else 0.0


@dataclass(frozen=True)
class PowerAbs(ScalarKind):
    """kappa*|t|^q with q > 1; prox solves p + q*gamma*kappa*p^(q-1) = |t|."""

    kappa: float
    q: float

    def __post_init__(self):
        _require(math.isfinite(self.kappa) and self.kappa > 0, "kappa must be > 0")
        _require(math.isfinite(self.q) and self.q > 1, "q must be > 1")

    def value(self, t: float) -> float:
        return self.kappa * abs(t) ** self.q

    def prox(self, t: float, gamma: float = 1.0) -> float:
        a = abs(t)
        if a == 0.0:
            return 0.0
        c = self.q * gamma * self.kappa
        p = _solve_residual(lambda p: p + c * _pow(p, self.q - 1.0) - a, 0.0, a)
        return math.copysign(p, t)


@dataclass(frozen=True)
class Huber(ScalarKind):
    """kappa*t^2 near 0, slope omega*sqrt(2*kappa) beyond |t| = omega/sqrt(2*kappa)."""

    kappa: float
    omega: float

    def __post_init__(self):
        _require(math.isfinite(self.kappa) and self.kappa > 0, "kappa must be > 0")
        _require(math.isfinite(self.omega) and self.omega > 0, "omega must be > 0")

    def value(self, t: float) -> float:
        knee = self.omega / math.sqrt(2.0 * self.kappa)
        if abs(t) <= knee:
            return self.kappa * t * t
        return self.omega * math.sqrt(2.0 * self.kappa) * abs(t) - 0.5 * self.omega**2

    def prox(self, t: float, gamma: float = 1.0) -> float:
        slope = self.omega * math.sqrt(2.0 * self.kappa)
        shrink = 2.0 * gamma * self.kappa + 1.0
        if abs(t) <= self.omega * shrink / math.sqrt(2.0 * self.kappa):
            return t / shrink
        return t - gamma * slope * math.copysign(1.0, t)


@dataclass(frozen=True)
class AbsQuadPower(ScalarKind):
    """omega*|t| + tau*t^2 + kappa*|t|^q; prox chains a soft threshold, a
    quadratic shrink and the power prox."""

    omega: float
    tau: float
    kappa: float
    q: float

    def __post_init__(self):
        _require(math.isfinite(self.omega) and self.omega > 0, "omega must be > 0")
        _require(math.isfinite(self.tau) and self.tau >= 0, "tau must be >= 0")
        _require(math.isfinite(self.kappa) and self.kappa > 0, "kappa must be > 0")
        _require(math.isfinite(self.q) and self.q > 1, "q must be > 1")

    def value(self, t: float) -> float:
        a = abs(t)
        return self.omega * a + self.tau * t * t + self.kappa * a**self.q

    def prox(self, t: float, gamma: float = 1.0) -> float:
        shrink = 2.0 * gamma * self.tau + 1.0
        w = max(abs(t) - gamma * self.omega, 0.0) / shrink
        if w == 0.0:
            return 0.0
        c = self.q * (gamma * self.kappa / shrink)
        p = _solve_residual(lambda p: p + c * _pow(p, self.q - 1.0) - w, 0.0, w)
        return math.copysign(p, t)


@dataclass(frozen=True)
class AbsMinusLog(ScalarKind):
    """omega*|t| - ln(1 + omega*|t|): sublinear near 0, linear tails."""

    omega: float

    def __post_init__(self):
        _require(math.isfinite(self.omega) and self.omega > 0, "omega must be > 0")

    def value(self, t: float) -> float:
        a = self.omega * abs(t)
        return a - math.log1p(a)

    def prox(self, t: float, gamma: float = 1.0) -> float:
        a = self.omega * abs(t)
        b = a - gamma * self.omega**2 - 1.0
        p = (b + math.sqrt(b * b + 4.0 * a)) / (2.0 * self.omega)
        return math.copysign(p, t) if t != 0.0 else 0.0


@dataclass(frozen=True)
class LinearNonneg(ScalarKind):
    """omega*t on t >= 0, +inf otherwise; prox is a one-sided soft threshold."""

    omega: float

    def __post_init__(self):
        _require(math.isfinite(self.omega) and self.omega > 0, "omega must be > 0")

    def value(self, t: float) -> float:
        if t < -_DOMAIN_SLACK:
            return math.inf
        return self.omega * max(t, 0.0)

    def prox(self, t: float, gamma: float = 1.0) -> float:
        return max(t - gamma * self.omega, 0.0)


@dataclass(frozen=True)
class NegRoot(ScalarKind):
    """-omega*t^(1/q) on t >= 0, +inf otherwise (q > 1)."""

    omega: float
    q: float

    def __post_init__(self):
        _require(math.isfinite(self.omega) and self.omega > 0, "omega must be > 0")
        _require(math.isfinite(self.q) and self.q > 1, "q must be > 1")

    def value(self, t: float) -> float:
        if t < -_DOMAIN_SLACK:
            return math.inf
        return -self.omega * max(t, 0.0) ** (1.0 / self.q)

    def prox(self, t: float, gamma: float = 1.0) -> float:
        c = gamma * self.omega / self.q
        expo = 1.0 / self.q - 1.0

        def r(p: float) -> float:
            return p - t - c * _pow(p, expo)

        hi = max(t, 1.0) + c + 1.0
        return _solve_residual(r, _shrink_lo(r, hi), hi)


@dataclass(frozen=True)
class InversePower(ScalarKind):
    """omega*t^(-q) on t > 0, +inf otherwise (q > 1)."""

    omega: float
    q: float

    def __post_init__(self):
        _require(math.isfinite(self.omega) and self.omega > 0, "omega must be > 0")
        _require(math.isfinite(self.q) and self.q > 1, "q must be > 1")

    def value(self, t: float) -> float:
        if t <= 0.0:
            return math.inf
        return self.omega * _pow(t, -self.q)

    def prox(self, t: float, gamma: float = 1.0) -> float:
        c = gamma * self.q * self.omega

        def r(p: float) -> float:
            return p - t - c * _pow(p, -self.q - 1.0)

        hi = max(t, 1.0) + c + 1.0
        return _solve_residual(r, _shrink_lo(r, hi), hi)


@dataclass(frozen=True)
class Entropy(ScalarKind):
    """t*ln(t) on t > 0 (0 at t = 0); prox is a scaled Lambert-W evaluation."""

    def value(self, t: float) -> float:
        if t < -_DOMAIN_SLACK:
            return math.inf
        if t <= 0.0:
            return 0.0
        return t * math.log(t)

    def prox(self, t: float, gamma: float = 1.0) -> float:
        return gamma * lambert_w_exp(t / gamma - math.log(gamma))


@dataclass(frozen=True)
class LogThreshold(ScalarKind):
    """Split logarithm on ]lo, hi[ with lo < 0 < hi; its prox thresholds over
    [gamma/lo, gamma/hi] and saturates with asymptotes at lo and hi."""

    lo: float
    hi: float

    def __post_init__(self):
        _require(math.isfinite(self.lo) and math.isfinite(self.hi), "endpoints must be finite")
        _require(self.lo < 0.0 < self.hi, f"needs lo < 0 < hi, got [{self.lo}, {self.hi}]")

    def value(self, t: float) -> float:
        if self.lo < t <= 0.0:
            return -math.log(t - self.lo) + math.log(-self.lo)
        if 0.0 < t < self.hi:
            return -math.log(self.hi - t) + math.log(self.hi)
        return math.inf

    def prox(self, t: float, gamma: float = 1.0) -> float:
        if t < gamma / self.lo:
            return 0.5 * (t + self.lo + math.sqrt((t - self.lo) ** 2 + 4.0 * gamma))
        if t > gamma / self.hi:
            return 0.5 * (t + self.hi - math.sqrt((t - self.hi) ** 2 + 4.0 * gamma))
        return 0.0


@dataclass(frozen=True)
class LogQuadratic(ScalarKind):
    """-kappa*ln(t) + tau*t^2/2 + alpha*t on t > 0; closed-form prox."""

    kappa: float
    tau: float = 0.0
    alpha: float = 0.0

    def __post_init__(self):
        _require(math.isfinite(self.kappa) and self.kappa > 0, "kappa must be > 0")
        _require(math.isfinite(self.tau) and self.tau >= 0, "tau must be >= 0")
        _require(math.isfinite(self.alpha), "alpha must be finite")

    def value(self, t: float) -> float:
        if t <= 0.0:
            return math.inf
        return -self.kappa * math.log(t) + 0.5 * self.tau * t * t + self.alpha * t

    def prox(self, t: float, gamma: float = 1.0) -> float:
        shift = t - gamma * self.alpha
        denom = 2.0 * (1.0 + gamma * self.tau)
        return (shift + math.sqrt(shift * shift + 2.0 * denom * gamma * self.kappa)) / denom


@dataclass(frozen=True)
class LogInverse(ScalarKind):
    """-kappa*ln(t) + alpha*t + omega/t on t > 0."""

    kappa: float
    alpha: float
    omega: float

    def __post_init__(self):
        _require(math.isfinite(self.kappa) and self.kappa > 0, "kappa must be > 0")
        _require(math.isfinite(self.alpha), "alpha must be finite")
        _require(math.isfinite(self.omega) and self.omega > 0, "omega must be > 0")

    def value(self, t: float) -> float:
        if t <= 0.0:
            return math.inf
        return -self.kappa * math.log(t) + self.alpha * t + self.omega / t

    def prox(self, t: float, gamma: float = 1.0) -> float:
        def r(p: float) -> float:
            return p - t + gamma * (self.alpha - self.kappa * _pow(p, -1.0) - self.omega * _pow(p, -2.0))

        hi = max(t - gamma * self.alpha, 1.0) + gamma * self.kappa + gamma * self.omega + 1.0
        return _solve_residual(r, _shrink_lo(r, hi), hi)


@dataclass(frozen=True)
class LogPower(ScalarKind):
    """-kappa*ln(t) + omega*t^q on t > 0 (q > 1)."""

    kappa: float
    omega: float
    q: float

    def __post_init__(self):
        _require(math.isfinite(self.kappa) and self.kappa > 0, "kappa must be > 0")
        _require(math.isfinite(self.omega) and self.omega > 0, "omega must be > 0")
        _require(math.isfinite(self.q) and self.q > 1, "q must be > 1")

    def value(self, t: float) -> float:
        if t <= 0.0:
            return math.inf
        return -self.kappa * math.log(t) + self.omega * t**self.q

    def prox(self, t: float, gamma: float = 1.0) -> float:
        def r(p: float) -> float:
            return p - t + gamma * (self.q * self.omega * _pow(p, self.q - 1.0) - self.kappa * _pow(p, -1.0))

        hi = max(t, 1.0) + gamma * self.kappa + 1.0
        return _solve_residual(r, _shrink_lo(r, hi), hi)


@dataclass(frozen=True)
class IntervalLogBarrier(ScalarKind):
    """-k_lo*ln(t - lo) - k_hi*ln(hi - t) on ]lo, hi[."""

    lo: float
    hi: float
    k_lo: float
    k_hi: float

    def __post_init__(self):
        _require(math.isfinite(self.lo) and math.isfinite(self.hi), "endpoints must be finite")
        _require(self.lo < self.hi, f"barrier needs lo < hi, got [{self.lo}, {self.hi}]")
        _require(math.isfinite(self.k_lo) and self.k_lo > 0, "k_lo must be > 0")
        _require(math.isfinite(self.k_hi) and self.k_hi > 0, "k_hi must be > 0")

    def value(self, t: float) -> float:
        if not self.lo < t < self.hi:
            return math.inf
        return -self.k_lo * math.log(t - self.lo) - self.k_hi * math.log(self.hi - t)

    def prox(self, t: float, gamma: float = 1.0) -> float:
        def r(p: float) -> float:
            return p - t - gamma * self.k_lo / (p - self.lo) + gamma * self.k_hi / (self.hi - p)

        width = self.hi - self.lo
        dlo = dhi = 0.25 * width
        for _ in range(200):
            if r(self.lo + dlo) < 0.0:
                break
            dlo *= 0.25
        else:
            raise BracketingError("could not bracket the barrier prox near lo")
        for _ in range(200):
            if r(self.hi - dhi) > 0.0:
                break
            dhi *= 0.25
        else:
            raise BracketingError("could not bracket the barrier prox near hi")
        return _solve_residual(r, self.lo + dlo, self.hi - dhi)


SCALAR_KINDS = {
    "interval": Interval,
    "interval_support": IntervalSupport,
    "smooth_plus_support": SmoothPlusSupport,
    "deadzone": Deadzone,
    "power_abs": PowerAbs,
    "huber": Huber,
    "abs_quad_power": AbsQuadPower,
    "abs_minus_log": AbsMinusLog,
    "linear_nonneg": LinearNonneg,
    "neg_root": NegRoot,
    "inverse_power": InversePower,
    "entropy": Entropy,
    "log_threshold": LogThreshold,
    "log_quadratic": LogQuadratic,
    "log_inverse": LogInverse,
    "log_power": LogPower,
    "interval_log_barrier": IntervalLogBarrier,
}


def scalar_prox(kind: ScalarKind, x: float, gamma: float = 1.0) -> float:
    """Minimizer of gamma*phi(p) + 0.5*(x - p)^2 for the given scalar kind."""
    if not (math.isfinite(gamma) and gamma > 0):
        raise InvalidParameterError(f"prox scale must be positive, got {gamma}")
    if not math.isfinite(x):
        raise InvalidParameterError(f"prox input must be finite, got {x}")
    return float(kind.prox(float(x), float(gamma)))


# ---------------------------------------------------------------------------
# calculus combinators
# ---------------------------------------------------------------------------


def separable(kinds, dim: int | None = None) -> ProxFn:
    """Coordinatewise sum of scalar kinds in the canonical basis.

    ``kinds`` is either a single kind broadcast over ``dim`` coordinates or a
    sequence with one kind per coordinate.
    """
    if isinstance(kinds, ScalarKind):
        if dim is None:
            raise InvalidParameterError("broadcasting a single kind requires dim")
        kinds = [kinds] * dim
    else:
        kinds = list(kinds)
        if not kinds or not all(isinstance(k, ScalarKind) for k in kinds):
            raise InvalidParameterError("kinds must be a nonempty sequence of ScalarKind")
        if dim is not None and dim != len(kinds):
            raise InvalidParameterError(f"{len(kinds)} kinds for dimension {dim}")
    n = len(kinds)

    def value(x: Array) -> float:
        return float(sum(k.value(float(t)) for k, t in zip(kinds, x)))

    def prox_impl(gamma: float, x: Array) -> Array:
        return np.array([k.prox(float(t), gamma) for k, t in zip(kinds, x)])

    return ProxFn(dim=n, value=value, prox_impl=prox_impl, name="separable")


def basis_separable(kinds, basis) -> ProxFn:
    """Sum of scalar kinds applied to coordinates in an orthonormal basis.

    ``basis`` holds the basis vectors as columns; B^T B = I is probed at
    construction.  The prox maps to coordinates, applies the scalar proxes and
    maps back.
    """
    B = np.asarray(basis, dtype=float)
    kinds = list(kinds)
    if B.ndim != 2 or B.shape[0] != B.shape[1] or B.shape[1] != len(kinds):
        raise InvalidParameterError("basis must be square with one column per kind")
    if np.linalg.norm(B.T @ B - np.eye(B.shape[1])) > 1e-10:
        raise InvalidParameterError("basis columns must be orthonormal")

    def value(x: Array) -> float:
        c = B.T @ x
        return float(sum(k.value(float(t)) for k, t in zip(kinds, c)))

    def prox_impl(gamma: float, x: Array) -> Array:
        c = B.T @ x
        return B @ np.array([k.prox(float(t), gamma) for k, t in zip(kinds, c)])

    return ProxFn(dim=B.shape[0], value=value, prox_impl=prox_impl, name="basis_separable")


def weighted_l1(weights) -> ProxFn:
    """sum_k w_k |x_k| with w_k > 0 (coordinatewise soft threshold)."""
    w = as_vector(weights)
    if np.any(w <= 0):
        raise InvalidParameterError("l1 weights must be strictly positive")
    return separable([IntervalSupport(-wk, wk) for wk in w])


def zero_fn(dim: int) -> ProxFn:
    """The zero function; its prox is the identity."""
    return ProxFn(dim=dim, value=lambda x: 0.0, prox_impl=lambda gamma, x: x, name="zero")


def quadratic_deviation(r, weight: float = 1.0) -> ProxFn:
    """(weight/2)*||x - r||^2 with its closed-form prox."""
    r = as_vector(r)
    w = float(weight)
    if not (np.isfinite(w) and w > 0):
        raise InvalidParameterError(f"weight must be > 0, got {w}")

    def value(x: Array) -> float:
        return 0.5 * w * float(np.linalg.norm(x - r) ** 2)

    def prox_impl(gamma: float, x: Array) -> Array:
        c = gamma * w
        return (x + c * r) / (1.0 + c)

    return ProxFn(dim=r.size, value=value, prox_impl=prox_impl, name="quadratic_deviation")


def scaled(base: ProxFn, coeff: float) -> ProxFn:
    """coeff * f for coeff > 0; the scale folds into the prox parameter."""
    coeff = float(coeff)
    if not (np.isfinite(coeff) and coeff > 0):
        raise InvalidParameterError(f"scaling coefficient must be > 0, got {coeff}")
    return ProxFn(
        dim=base.dim,
        value=lambda x: coeff * base.value(x),
        prox_impl=lambda gamma, x: base.prox(gamma * coeff, x),
        name=f"scaled({base.name})",
        convex_set=base.convex_set,
    )


def translated(base: ProxFn, z) -> ProxFn:
    """x |-> f(x - z)."""
    z = as_vector(z, base.dim)
    return ProxFn(
        dim=base.dim,
        value=lambda x: base.value(x - z),
        prox_impl=lambda gamma, x: z + base.prox(gamma, x - z),
        name=f"translated({base.name})",
    )


def arg_scaled(base: ProxFn, rho: float) -> ProxFn:
    """x |-> f(x / rho) for rho != 0 (negative rho allowed)."""
    rho = float(rho)
    if rho == 0.0 or not np.isfinite(rho):
        raise InvalidParameterError(f"scaling needs a finite rho != 0, got {rho}")
    return ProxFn(
        dim=base.dim,
        value=lambda x: base.value(x / rho),
        prox_impl=lambda gamma, x: rho * base.prox(gamma / rho**2, x / rho),
        name=f"arg_scaled({base.name})",
    )


def reflected(base: ProxFn) -> ProxFn:
    """x |-> f(-x); the prox is the point reflection of the base prox."""
    return ProxFn(
        dim=base.dim,
        value=lambda x: base.value(-x),
        prox_impl=lambda gamma, x: -base.prox(gamma, -x),
        name=f"reflected({base.name})",
    )


def quad_perturbed(base: ProxFn, alpha: float = 0.0, u=None, offset: float = 0.0) -> ProxFn:
    """x |-> f(x) + alpha*||x||^2/2 + u^T x + offset with alpha >= 0."""
    alpha = float(alpha)
    if not (np.isfinite(alpha) and alpha >= 0.0):
        raise InvalidParameterError(f"alpha must be >= 0, got {alpha}")
    u = np.zeros(base.dim) if u is None else as_vector(u, base.dim)
    offset = float(offset)

    def value(x: Array) -> float:
        return base.value(x) + 0.5 * alpha * float(x @ x) + float(u @ x) + offset

    def prox_impl(gamma: float, x: Array) -> Array:
        denom = 1.0 + gamma * alpha
        return base.prox(gamma / denom, (x - gamma * u) / denom)

    return ProxFn(dim=base.dim, value=value, prox_impl=prox_impl, name=f"quad_perturbed({base.name})")


def _conjugate_value(base: ProxFn, u: Array) -> float:
    """f*(u) through the fixed point w = prox_f(w) + u; exact by Fenchel-Young
    once converged.  Divergence or non-convergence of the (firmly
    nonexpansive) iteration signals u outside dom f*, reported as +inf."""
    w = u.copy()
    blowup = 1e9 * (1.0 + float(np.linalg.norm(u)))
    converged = False
    for _ in range(5000):
        p = base.prox(1.0, w)
        w_new = p + u
        if np.linalg.norm(w_new) > blowup:
            return math.inf
        if np.linalg.norm(w_new - w) <= 1e-14 * max(1.0, float(np.linalg.norm(w))):
            w = w_new
            converged = True
            break
        w = w_new
    if not converged:
        return math.inf
    p = base.prox(1.0, w)
    return float(u @ p) - base.eval(p)


def conjugate(base: ProxFn, value_fn=None) -> ProxFn:
    """Fenchel conjugate f*; the prox comes from the Moreau decomposition
    prox_{gamma f*}(x) = x - gamma * prox_{f/gamma}(x/gamma).

    ``value_fn`` overrides the evaluation with a closed form; without it the
    conjugate is evaluated by an iterative subgradient inversion (accurate for
    the catalog functions but slower than a closed form).
    """
    value = value_fn if value_fn is not None else (lambda x: _conjugate_value(base, x))
    return ProxFn(
        dim=base.dim,
        value=value,
        prox_impl=lambda gamma, x: x - gamma * base.prox(1.0 / gamma, x / gamma),
        name=f"conjugate({base.name})",
    )


def moreau_envelope(base: ProxFn) -> ProxFn:
    """Infimal convolution of f with ||.||^2/2; evaluated through one prox call."""

    def value(x: Array) -> float:
        p = base.prox(1.0, x)
        return base.eval(p) + 0.5 * float(np.linalg.norm(x - p) ** 2)

    def prox_impl(gamma: float, x: Array) -> Array:
        return (x + gamma * base.prox(1.0 + gamma, x)) / (1.0 + gamma)

    return ProxFn(dim=base.dim, value=value, prox_impl=prox_impl, name=f"envelope({base.name})")


def moreau_complement(base: ProxFn) -> ProxFn:
    """||x||^2/2 minus the Moreau envelope of f."""

    def value(x: Array) -> float:
        p = base.prox(1.0, x)
        env = base.eval(p) + 0.5 * float(np.linalg.norm(x - p) ** 2)
        return 0.5 * float(x @ x) - env

    def prox_impl(gamma: float, x: Array) -> Array:
        return x - gamma * base.prox(1.0 / (1.0 + gamma), x / (1.0 + gamma))

    return ProxFn(dim=base.dim, value=value, prox_impl=prox_impl, name=f"complement({base.name})")


def squared_distance(ind: ProxFn) -> ProxFn:
    """d_C^2/2 for the set carried by an indicator function."""
    C = ind.convex_set
    if C is None:
        raise InvalidParameterError("squared_distance requires an indicator function")

    def value(x: Array) -> float:
        return 0.5 * C.distance(x) ** 2

    def prox_impl(gamma: float, x: Array) -> Array:
        return (x + gamma * C.project(x)) / (1.0 + gamma)

    return ProxFn(dim=ind.dim, value=value, prox_impl=prox_impl, name="squared_distance")


def tight_frame_compose(base: ProxFn, L: LinearMap) -> ProxFn:
    """f o L for a semi-orthogonal L (L L^T = nu I, declared on the map)."""
    if L.tight_frame_nu is None:
        raise PreconditionError("composition requires a declared tight-frame constant on L")
    nu = float(L.tight_frame_nu)
    rng = np.random.default_rng(11)
    for _ in range(3):
        u = rng.standard_normal(L.rows)
        if np.linalg.norm(L.apply(L.adjoint(u)) - nu * u) > 1e-8 * max(1.0, np.linalg.norm(u)):
            raise PreconditionError(f"L L^T = {nu} I fails on random probes")
    if base.dim != L.rows:
        raise InvalidParameterError("base dimension must match the operator range")

    def value(x: Array) -> float:
        return base.value(L.apply(x))

    def prox_impl(gamma: float, x: Array) -> Array:
        Lx = L.apply(x)
        return x + L.adjoint(base.prox(gamma * nu, Lx) - Lx) / nu

    return ProxFn(dim=L.cols, value=value, prox_impl=prox_impl, name=f"compose({base.name},{L.name})")


def quadratic(L: LinearMap, y, weight: float = 1.0) -> ProxFn:
    """(weight/2)*||L x - y||^2; the prox solves an SPD linear system."""
    y = as_vector(y, L.rows)
    w = float(weight)
    if not (np.isfinite(w) and w > 0):
        raise InvalidParameterError(f"weight must be > 0, got {w}")
    A = L.to_dense()
    G = A.T @ A
    Aty = A.T @ y
    eye = np.eye(L.cols)

    def value(x: Array) -> float:
        return 0.5 * w * float(np.linalg.norm(A @ x - y) ** 2)

    def prox_impl(gamma: float, x: Array) -> Array:
        c = gamma * w
        return np.linalg.solve(eye + c * G, x + c * Aty)

    return ProxFn(dim=L.cols, value=value, prox_impl=prox_impl, name="quadratic")


def scaled_distance(C, weight: float = 1.0) -> ProxFn:
    """weight * d_C(x); the prox moves toward the projection, by at most the scale."""
    w = float(weight)
    if not (np.isfinite(w) and w > 0):
        raise InvalidParameterError(f"weight must be > 0, got {w}")

    def value(x: Array) -> float:
        return w * C.distance(x)

    def prox_impl(gamma: float, x: Array) -> Array:
        proj = C.project(x)
        d = float(np.linalg.norm(x - proj))
        step = gamma * w
        if d > step:
            return x + step * (proj - x) / d
        return proj

    return ProxFn(dim=C.dim, value=value, prox_impl=prox_impl, name="scaled_distance")


def _check_even(phi: ScalarKind) -> None:
    for t in (0.37, 1.21, 2.83):
        a, b = phi.value(t), phi.value(-t)
        if a != b and abs(a - b) > 1e-9 * (1.0 + abs(a)):
            raise InvalidParameterError("phi must be an even function")


def distance_penalty(C, phi: ScalarKind) -> ProxFn:
    """phi(d_C(x)) for even phi, differentiable at 0 with phi'(0) = 0."""
    _check_even(phi)

    def value(x: Array) -> float:
        return phi.value(C.distance(x))

    def prox_impl(gamma: float, x: Array) -> Array:
        proj = C.project(x)
        d = float(np.linalg.norm(x - proj))
        if d <= 1e-14:
            return x
        return x + (1.0 - phi.prox(d, gamma) / d) * (proj - x)

    return ProxFn(dim=C.dim, value=value, prox_impl=prox_impl, name="distance_penalty")


def support_function(C) -> ProxFn:
    """Support function of C; prox via the Moreau decomposition with the projection."""

    def value(x: Array) -> float:
        return C.support(x)

    def prox_impl(gamma: float, x: Array) -> Array:
        return x - gamma * C.project(x / gamma)

    return ProxFn(dim=C.dim, value=value, prox_impl=prox_impl, name="support")


def support_plus_radial(C, phi: ScalarKind, argmin_max: float = 0.0) -> ProxFn:
    """sigma_C(x) + phi(||x||) for even, non-constant phi.

    ``argmin_max`` is max(Argmin phi); it must be finite (phi with unbounded
    argmin sets are outside this constructor's scope) and defaults to 0, the
    argmin of every strictly-convex-at-0 even phi.
    """
    _check_even(phi)
    argmin_max = float(argmin_max)
    if not (np.isfinite(argmin_max) and argmin_max >= 0.0):
        raise InvalidParameterError("argmin_max must be finite and >= 0")

    def value(x: Array) -> float:
        return C.support(x) + phi.value(float(np.linalg.norm(x)))

    def prox_impl(gamma: float, x: Array) -> Array:
        proj = gamma * C.project(x / gamma)  # projection onto gamma*C
        diff = x - proj
        d = float(np.linalg.norm(diff))
        if d > argmin_max:
            return (phi.prox(d, gamma) / d) * diff
        return diff

    return ProxFn(dim=C.dim, value=value, prox_impl=prox_impl, name="support_plus_radial")


def stacked(fs) -> ProxFn:
    """Direct sum over consecutive blocks: F(x) = sum_i f_i(x_i)."""
    fs = list(fs)
    if not fs:
        raise InvalidParameterError("stacked needs at least one function")
    dims = [f.dim for f in fs]
    offsets = np.cumsum([0] + dims)
    total = int(offsets[-1])

    def value(x: Array) -> float:
        return float(sum(f.eval(x[a:b]) for f, a, b in zip(fs, offsets[:-1], offsets[1:])))

    def prox_impl(gamma: float, x: Array) -> Array:
        return np.concatenate([f.prox(gamma, x[a:b]) for f, a, b in zip(fs, offsets[:-1], offsets[1:])])

    return ProxFn(dim=total, value=value, prox_impl=prox_impl, name="stacked")
