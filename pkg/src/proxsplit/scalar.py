"""One-dimensional numerical kernels.

Safeguarded root finding for the implicit scalar prox equations, a log-domain
Lambert-W evaluation for the entropy prox, and a golden-section prox oracle
used as ground truth in tests.  All functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import InvalidParameterError

__all__ = [
    "Bracket",
    "BracketingError",
    "InfeasibleBracketError",
    "solve_monotone",
    "lambert_w_exp",
    "scalar_prox_oracle",
]

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0  # golden-section shrink ratio


class BracketingError(RuntimeError):
    """No sign change found after the allowed bracket expansions."""


class InfeasibleBracketError(ValueError):
    """The objective is non-finite everywhere on the scanned bracket."""


@dataclass(frozen=True)
class Bracket:
    """A search interval [lo, hi] with lo < hi."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise InvalidParameterError("bracket endpoints must be finite")
        if not self.lo < self.hi:
            raise InvalidParameterError(f"bracket needs lo < hi, got [{self.lo}, {self.hi}]")


def solve_monotone(g, bracket: Bracket, tol: float = 1e-12, max_iter: int = 200) -> float:
    """Root of a continuous monotone g with a sign change across the bracket.

    Bisection is the backbone; a secant step is accepted only when it lands
    strictly inside the current bracket.  Returns p with |g(p)| <= tol or with
    the final bracket width <= tol.  If the initial bracket shows no sign
    change it is symmetrically doubled up to 64 times before giving up.
    """
    lo, hi = float(bracket.lo), float(bracket.hi)
    glo, ghi = float(g(lo)), float(g(hi))
    if math.isnan(glo) or math.isnan(ghi):
        raise BracketingError("g evaluated to NaN on the bracket")
    expansions = 0
    while glo * ghi > 0.0:
        if expansions >= 64:
            raise BracketingError(
                f"no sign change on [{lo}, {hi}] after {expansions} doublings"
            )
        w = (hi - lo) / 2.0
        lo -= w
        hi += w
        glo, ghi = float(g(lo)), float(g(hi))
        if math.isnan(glo) or math.isnan(ghi):
            raise BracketingError("g evaluated to NaN while expanding the bracket")
        expansions += 1
    if glo == 0.0:
        return lo
    if ghi == 0.0:
        return hi
    sign = 1.0 if ghi > 0.0 else -1.0  # normalize to increasing orientation
    glo, ghi = sign * glo, sign * ghi
    p = 0.5 * (lo + hi)
    for k in range(max_iter):
        width = hi - lo
        p = 0.5 * (lo + hi)
        # secant acceleration on alternate steps only, so the bracket width is
        # guaranteed to halve at least every other iteration
        if k % 2 == 1 and math.isfinite(glo) and math.isfinite(ghi) and ghi != glo:
            secant = hi - ghi * (hi - lo) / (ghi - glo)
            if lo + 0.01 * width < secant < hi - 0.01 * width:
                p = secant
        gp = sign * float(g(p))
        if math.isnan(gp):
            raise BracketingError("g evaluated to NaN inside the bracket")
        if abs(gp) <= tol or width <= tol:
            return p
        if gp < 0.0:
            lo, glo = p, gp
        else:
            hi, ghi = p, gp
    return 0.5 * (lo + hi)


def lambert_w_exp(x: float) -> float:
    """W(exp(x - 1)) for the principal Lambert-W branch, computed in log domain.

    Solves w + ln w = x - 1 for w > 0 (equivalently v + e^v = c with w = e^v),
    which avoids forming exp(x - 1) and therefore stays finite for large x.
    Newton on the strictly convex increasing v |-> e^v + v - c converges
    monotonically from a point left of the root.
    """
    x = float(x)
    if not math.isfinite(x):
        raise InvalidParameterError(f"lambert_w_exp needs finite input, got {x}")
    c = x - 1.0
    if c > 1.0:
        v = math.log(c - math.log(c))  # k(v) <= 0: left of the root
    else:
        v = c - 1.0  # k(c-1) = e^(c-1) - 1 <= 0 for c <= 1
    for _ in range(80):
        ev = math.exp(v)
        step = (ev + v - c) / (ev + 1.0)
        v -= step
        if abs(step) <= 1e-16 * max(1.0, abs(v)):
            break
    return math.exp(v)


def scalar_prox_oracle(phi, x: float, bracket: Bracket, tol: float = 1e-12) -> float:
    """Reference minimizer of phi(p) + 0.5*(x - p)^2 over the bracket.

    Test-only ground truth.  A 33-point scan first locates a finite value
    (raising InfeasibleBracketError when phi is non-finite at every scanned
    point); golden-section search then shrinks the bracket, breaking +inf ties
    toward the best finite point seen so far, which is safe because the
    domain of a convex phi is an interval.
    """
    x = float(x)

    def obj(p: float) -> float:
        return phi(p) + 0.5 * (x - p) ** 2

    a, b = float(bracket.lo), float(bracket.hi)
    best_p, best_v = math.nan, math.inf
    scan = 33
    for i in range(scan):
        t = a + (b - a) * i / (scan - 1)
        v = obj(t)
        if v < best_v:
            best_p, best_v = t, v
    if not math.isfinite(best_v):
        raise InfeasibleBracketError("objective non-finite everywhere on the bracket")

    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = obj(c), obj(d)
    for _ in range(300):
        if b - a <= tol:
            break
        if fc < best_v:
            best_p, best_v = c, fc
        if fd < best_v:
            best_p, best_v = d, fd
        if fc < fd or (fc == fd and best_p <= c):
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = obj(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = obj(d)
    mid = 0.5 * (a + b)
    if obj(mid) <= best_v:
        return mid
    return best_p
