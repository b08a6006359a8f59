"""Closed convex sets with exact projections.

Each set exposes membership (within an absolute tolerance), the Euclidean
projection, the distance, and the support function value (``+inf`` where the
supremum is unbounded).  Degenerate constructor inputs (zero normals,
negative radii, empty affine systems) are rejected at construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Array, InvalidParameterError, ProxFn, as_vector

__all__ = [
    "MEMBERSHIP_TOL",
    "ConvexSet",
    "Box",
    "Halfspace",
    "Hyperplane",
    "Ball",
    "AffineSubspace",
    "orthant",
    "point",
    "project",
    "indicator",
]

MEMBERSHIP_TOL = 1e-9


class ConvexSet:
    """Interface: nonempty closed convex subset of R^dim."""

    dim: int

    def project(self, x) -> Array:
        raise NotImplementedError

    def support(self, u) -> float:
        raise NotImplementedError

    def distance(self, x) -> float:
        x = as_vector(x, self.dim)
        return float(np.linalg.norm(x - self.project(x)))

    def contains(self, x, tol: float = MEMBERSHIP_TOL) -> bool:
        return self.distance(x) <= tol


@dataclass(frozen=True)
class Box(ConvexSet):
    """{x : lo <= x <= hi} coordinatewise; infinite bounds allowed."""

    lo: Array
    hi: Array

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lo, dtype=float))
        hi = np.atleast_1d(np.asarray(self.hi, dtype=float))
        if lo.shape != hi.shape or lo.ndim != 1:
            raise InvalidParameterError("box bounds must be 1-D vectors of equal length")
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)):
            raise InvalidParameterError("box bounds must not be NaN")
        if np.any(lo > hi):
            raise InvalidParameterError("box needs lo <= hi in every coordinate")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return self.lo.size

    def project(self, x) -> Array:
        return np.clip(as_vector(x, self.dim), self.lo, self.hi)

    def support(self, u) -> float:
        u = as_vector(u, self.dim)
        total = 0.0
        for ui, lo, hi in zip(u, self.lo, self.hi):
            if ui > 0.0:
                total += hi * ui  # inf * positive -> inf
            elif ui < 0.0:
                total += lo * ui
        return float(total)


@dataclass(frozen=True)
class Halfspace(ConvexSet):
    """{x : a^T x <= b} with a != 0."""

    a: Array
    b: float

    def __post_init__(self):
        a = as_vector(self.a)
        if np.linalg.norm(a) == 0.0:
            raise InvalidParameterError("halfspace normal must be nonzero")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", float(self.b))

    @property
    def dim(self) -> int:
        return self.a.size

    def project(self, x) -> Array:
        x = as_vector(x, self.dim)
        excess = float(self.a @ x) - self.b
        if excess <= 0.0:
            return x
        return x - (excess / float(self.a @ self.a)) * self.a

    def support(self, u) -> float:
        # finite only along the outward normal direction: u = t*a with t >= 0
        u = as_vector(u, self.dim)
        t = float(u @ self.a) / float(self.a @ self.a)
        if t < -1e-12 or np.linalg.norm(u - t * self.a) > 1e-10 * max(1.0, np.linalg.norm(u)):
            return np.inf
        return max(t, 0.0) * self.b


@dataclass(frozen=True)
class Hyperplane(ConvexSet):
    """{x : a^T x = b} with a != 0."""

    a: Array
    b: float

    def __post_init__(self):
        a = as_vector(self.a)
        if np.linalg.norm(a) == 0.0:
            raise InvalidParameterError("hyperplane normal must be nonzero")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", float(self.b))

    @property
    def dim(self) -> int:
        return self.a.size

    def project(self, x) -> Array:
        x = as_vector(x, self.dim)
        return x - ((float(self.a @ x) - self.b) / float(self.a @ self.a)) * self.a

    def support(self, u) -> float:
        u = as_vector(u, self.dim)
        t = float(u @ self.a) / float(self.a @ self.a)
        if np.linalg.norm(u - t * self.a) > 1e-10 * max(1.0, np.linalg.norm(u)):
            return np.inf
        return t * self.b


@dataclass(frozen=True)
class Ball(ConvexSet):
    """Euclidean ball {x : ||x - center|| <= radius}, radius >= 0."""

    center: Array
    radius: float

    def __post_init__(self):
        center = as_vector(self.center)
        radius = float(self.radius)
        if not (np.isfinite(radius) and radius >= 0.0):
            raise InvalidParameterError(f"ball radius must be >= 0, got {radius}")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", radius)

    @property
    def dim(self) -> int:
        return self.center.size

    def project(self, x) -> Array:
        x = as_vector(x, self.dim)
        d = x - self.center
        nd = float(np.linalg.norm(d))
        if nd <= self.radius:
            return x
        return self.center + (self.radius / nd) * d

    def support(self, u) -> float:
        u = as_vector(u, self.dim)
        return float(self.center @ u) + self.radius * float(np.linalg.norm(u))


@dataclass(frozen=True)
class AffineSubspace(ConvexSet):
    """{x : A x = b}; a dense pseudo-inverse is factored at construction."""

    A: Array
    b: Array
    _pinv: Array = field(init=False, repr=False, compare=False)
    _x0: Array = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        b = as_vector(self.b)
        if A.ndim != 2 or A.shape[0] != b.size:
            raise InvalidParameterError("affine system needs A (m x n) and b (m)")
        if not np.all(np.isfinite(A)):
            raise InvalidParameterError("affine system entries must be finite")
        pinv = np.linalg.pinv(A)
        x0 = pinv @ b
        if np.linalg.norm(A @ x0 - b) > 1e-8 * max(1.0, float(np.linalg.norm(b))):
            raise InvalidParameterError("inconsistent affine system: the set is empty")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "_pinv", pinv)
        object.__setattr__(self, "_x0", x0)

    @property
    def dim(self) -> int:
        return self.A.shape[1]

    def project(self, x) -> Array:
        x = as_vector(x, self.dim)
        return x - self._pinv @ (self.A @ x - self.b)

    def support(self, u) -> float:
        # finite only for u in the row space of A
        u = as_vector(u, self.dim)
        row_part = self.A.T @ (self._pinv.T @ u)
        if np.linalg.norm(u - row_part) > 1e-10 * max(1.0, np.linalg.norm(u)):
            return np.inf
        return float(u @ self._x0)


def orthant(dim: int) -> Box:
    """Nonnegative orthant {x >= 0}."""
    return Box(np.zeros(dim), np.full(dim, np.inf))


def point(c) -> Ball:
    """The singleton {c}."""
    return Ball(c, 0.0)


def project(C: ConvexSet, x) -> Array:
    """Nearest point of C to x."""
    return C.project(x)


def indicator(C: ConvexSet) -> ProxFn:
    """Indicator function of C; its prox is the projection for every scale."""

    def value(x: Array) -> float:
        return 0.0 if C.contains(x) else np.inf

    return ProxFn(
        dim=C.dim,
        value=value,
        prox_impl=lambda gamma, x: C.project(x),
        name=f"indicator({type(C).__name__})",
        convex_set=C,
    )
