"""Core abstractions shared by the whole toolkit.

Vectors are plain 1-D float64 numpy arrays, validated to be finite.  Convex
functions are carried by small immutable wrappers: ``ProxFn`` exposes an
extended-real evaluation together with its proximity map, ``SmoothFn`` a
real-valued evaluation, gradient and Lipschitz constant.  ``LinearMap`` wraps
a linear operator through forward/adjoint callables.  ``Schedule``,
``IterationRecord`` and ``SolveResult`` are the solver plumbing.

Everything here is immutable after construction and every operation is pure,
so all objects can be shared freely across threads.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

Array = np.ndarray

__all__ = [
    "Array",
    "InvalidInputError",
    "InvalidParameterError",
    "InvalidScheduleError",
    "PreconditionError",
    "UnsupportedFunctionError",
    "as_vector",
    "ProxFn",
    "SmoothFn",
    "LinearMap",
    "matrix_map",
    "identity_map",
    "Schedule",
    "sequence_value",
    "IterationRecord",
    "SolveResult",
    "prox_of",
    "subgradient_certificate",
    "operator_norm",
    "check_adjoint",
    "firm_nonexpansiveness_violation",
    "gradient_check_error",
]


class InvalidInputError(ValueError):
    """A vector argument is malformed (wrong shape/dimension, NaN or inf)."""


class InvalidParameterError(ValueError):
    """A constructor parameter violates its documented range."""


class InvalidScheduleError(ValueError):
    """A step-size or relaxation value leaves its admissible interval."""


class PreconditionError(RuntimeError):
    """A structural precondition fails (rank, tight frame, invertibility)."""


class UnsupportedFunctionError(TypeError):
    """An operation received a function outside its supported family."""


def as_vector(x, dim: Optional[int] = None) -> Array:
    """Validate ``x`` as a finite 1-D float vector, optionally of length ``dim``."""
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.ndim != 1:
        raise InvalidInputError(f"expected a 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError("vector entries must be finite")
    if dim is not None and v.size != dim:
        raise InvalidInputError(f"expected a vector of dimension {dim}, got {v.size}")
    return v


@dataclass(frozen=True)
class ProxFn:
    """A proper lower-semicontinuous convex function with an explicit prox.

    ``value(x)`` returns f(x) in ]-inf, +inf] and ``prox_impl(gamma, x)``
    returns the unique minimizer of gamma*f(y) + 0.5*||x - y||^2.  Indicator
    functions additionally carry the underlying set in ``convex_set``.
    """

    dim: int
    value: Callable[[Array], float]
    prox_impl: Callable[[float, Array], Array]
    name: str = "f"
    convex_set: object = None

    def eval(self, x) -> float:
        return float(self.value(as_vector(x, self.dim)))

    def prox(self, gamma: float, x) -> Array:
        gamma = float(gamma)
        if not (np.isfinite(gamma) and gamma > 0):
            raise InvalidInputError(f"prox scale must be positive and finite, got {gamma}")
        p = self.prox_impl(gamma, as_vector(x, self.dim))
        return as_vector(p, self.dim)


@dataclass(frozen=True)
class SmoothFn:
    """A convex differentiable function with a ``lipschitz``-Lipschitz gradient."""

    dim: int
    value: Callable[[Array], float]
    grad_impl: Callable[[Array], Array]
    lipschitz: float
    name: str = "f"

    def __post_init__(self):
        if not (np.isfinite(self.lipschitz) and self.lipschitz > 0):
            raise InvalidParameterError(
                f"gradient Lipschitz constant must be positive, got {self.lipschitz}"
            )

    def eval(self, x) -> float:
        return float(self.value(as_vector(x, self.dim)))

    def grad(self, x) -> Array:
        return as_vector(self.grad_impl(as_vector(x, self.dim)), self.dim)


@dataclass(frozen=True)
class LinearMap:
    """A linear operator R^cols -> R^rows with an explicit adjoint.

    When ``tight_frame_nu`` is set, the operator is declared to satisfy
    L L^T = nu I; this is probed on random vectors at construction.
    """

    rows: int
    cols: int
    apply_impl: Callable[[Array], Array]
    adjoint_impl: Callable[[Array], Array]
    tight_frame_nu: Optional[float] = None
    name: str = "L"

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise InvalidParameterError("operator dimensions must be >= 1")
        if self.tight_frame_nu is not None:
            nu = float(self.tight_frame_nu)
            if not (np.isfinite(nu) and nu > 0):
                raise InvalidParameterError(f"tight frame constant must be > 0, got {nu}")
            rng = np.random.default_rng(7)
            for _ in range(3):
                u = rng.standard_normal(self.rows)
                gap = np.linalg.norm(self.apply(self.adjoint(u)) - nu * u)
                if gap > 1e-9 * max(1.0, np.linalg.norm(u)):
                    raise InvalidParameterError(
                        f"operator does not satisfy L L^T = {nu} I (probe gap {gap:.3e})"
                    )

    def apply(self, x) -> Array:
        return as_vector(self.apply_impl(as_vector(x, self.cols)), self.rows)

    def adjoint(self, u) -> Array:
        return as_vector(self.adjoint_impl(as_vector(u, self.rows)), self.cols)

    def to_dense(self) -> Array:
        """Materialize the operator column by column (desk-scale only)."""
        cols = np.empty((self.rows, self.cols))
        e = np.zeros(self.cols)
        for j in range(self.cols):
            e[j] = 1.0
            cols[:, j] = self.apply(e)
            e[j] = 0.0
        return cols


def matrix_map(A, tight_frame_nu: Optional[float] = None, name: str = "L") -> LinearMap:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise InvalidParameterError(f"expected a matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidParameterError("matrix entries must be finite")
    return LinearMap(
        rows=A.shape[0],
        cols=A.shape[1],
        apply_impl=lambda x: A @ x,
        adjoint_impl=lambda u: A.T @ u,
        tight_frame_nu=tight_frame_nu,
        name=name,
    )


def identity_map(n: int) -> LinearMap:
    return LinearMap(n, n, lambda x: x, lambda u: u, tight_frame_nu=1.0, name="I")


ScalarSequence = Union[float, Sequence[float], Callable[[int], float]]


@dataclass(frozen=True)
class Schedule:
    """Step-size (gamma_n) and relaxation (lambda_n) sequences plus the margin
    epsilon pinning their admissible intervals.

    Each sequence may be a constant, a finite sequence (held at its last value
    afterwards), or a callable n -> value.  ``None`` falls back to the
    solver's documented default.  Solvers validate every emitted value against
    their algorithm-specific admissible interval before using it.
    """

    gamma: Optional[ScalarSequence] = None
    lam: Optional[ScalarSequence] = None
    epsilon: Optional[float] = None


def sequence_value(seq: ScalarSequence, n: int) -> float:
    """Value of a constant / sequence / callable schedule entry at index n."""
    if callable(seq):
        return float(seq(n))
    if np.isscalar(seq):
        return float(seq)
    values = list(seq)
    if not values:
        raise InvalidScheduleError("empty schedule sequence")
    return float(values[min(n, len(values) - 1)])


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    objective: float
    residual: float
    elapsed_ns: int


@dataclass(frozen=True)
class SolveResult:
    """Final iterate plus per-iteration diagnostics.

    ``aux`` carries solver-specific extras (e.g. the Douglas-Rachford driver
    variable or the dual variable) needed to evaluate fixed-point residuals.
    """

    final_x: Array
    converged: bool
    iterations: int
    records: tuple
    aux: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.iterations != len(self.records):
            raise InvalidParameterError("iteration count must equal the number of records")


def prox_of(f: ProxFn, gamma: float, x) -> Array:
    """Proximity map of f at scale gamma: the unique p with x - p in gamma*df(p)."""
    return f.prox(gamma, x)


def subgradient_certificate(
    f: ProxFn,
    x,
    p,
    samples: int = 64,
    *,
    gamma: float = 1.0,
    radius: float = 1.0,
    ys=None,
    seed: int = 0,
) -> float:
    """Max violation of the subgradient inequality certifying p = prox(gamma, x).

    p is the prox of x iff u = (x - p)/gamma is a subgradient of f at p, i.e.
    f(p) + u^T (y - p) <= f(y) for all y.  Returns the largest value of
    f(p) + u^T (y - p) - f(y) over the sampled y (<= tol certifies optimality
    on the sample).  Purely diagnostic; never raises on a bad p.
    """
    x = as_vector(x, f.dim)
    p = as_vector(p, f.dim)
    fp = f.eval(p)
    if not np.isfinite(fp):
        return np.inf  # claimed prox lies outside dom f
    u = (x - p) / float(gamma)
    if ys is None:
        rng = np.random.default_rng(seed)
        scales = rng.uniform(0.0, radius, size=samples)
        dirs = rng.standard_normal((samples, f.dim))
        norms = np.maximum(np.linalg.norm(dirs, axis=1), 1e-300)
        ys = [p + s * d / nd for s, d, nd in zip(scales, dirs, norms)]
    worst = -np.inf
    for y in ys:
        y = as_vector(y, f.dim)
        worst = max(worst, fp + float(u @ (y - p)) - f.eval(y))
    return worst


def operator_norm(L: LinearMap, tol: float = 1e-8, max_iter: int = 500, seed: int = 0) -> float:
    """Spectral norm of L by power iteration on L^T L.

    Deterministic for a fixed seed of the start vector.  If the iteration does
    not reach the relative tolerance within ``max_iter`` steps, the current
    estimate is returned with a RuntimeWarning.
    """
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(L.cols)
    nv = np.linalg.norm(v)
    if nv == 0.0:
        v = np.ones(L.cols)
        nv = np.linalg.norm(v)
    v = v / nv
    lam_prev = -1.0
    lam = 0.0
    for _ in range(max_iter):
        u = L.apply(v)
        lam = float(u @ u)  # = ||L v||^2 with v unit
        if lam == 0.0:
            return 0.0
        w = L.adjoint(u)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return float(np.sqrt(lam))
        v = w / nw
        if abs(lam - lam_prev) <= tol * max(lam, 1e-300):
            return float(np.sqrt(lam))
        lam_prev = lam
    warnings.warn(
        f"operator_norm power iteration did not converge in {max_iter} steps; "
        "returning current estimate",
        RuntimeWarning,
    )
    return float(np.sqrt(lam))


def check_adjoint(L: LinearMap, trials: int = 16, seed: int = 0) -> float:
    """Max |<Lx, u> - <x, L^T u>| over seeded random probes."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        x = rng.standard_normal(L.cols)
        u = rng.standard_normal(L.rows)
        worst = max(worst, abs(float(L.apply(x) @ u) - float(x @ L.adjoint(u))))
    return worst


def firm_nonexpansiveness_violation(f: ProxFn, x, y, gamma: float = 1.0) -> float:
    """||px-py||^2 + ||(x-px)-(y-py)||^2 - ||x-y||^2 (<= tol for a true prox)."""
    x = as_vector(x, f.dim)
    y = as_vector(y, f.dim)
    px = f.prox(gamma, x)
    py = f.prox(gamma, y)
    lhs = np.linalg.norm(px - py) ** 2 + np.linalg.norm((x - px) - (y - py)) ** 2
    return float(lhs - np.linalg.norm(x - y) ** 2)


def gradient_check_error(f: SmoothFn, x, h: float = 1e-6) -> float:
    """Relative gap between f.grad and central finite differences of f.eval."""
    x = as_vector(x, f.dim)
    g = f.grad(x)
    fd = np.empty_like(g)
    for i in range(f.dim):
        e = np.zeros(f.dim)
        e[i] = h
        fd[i] = (f.eval(x + e) - f.eval(x - e)) / (2.0 * h)
    return float(np.linalg.norm(fd - g) / max(1.0, np.linalg.norm(g)))
