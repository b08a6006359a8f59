"""Builders for the desk-scale worked examples.

Each builder returns a ``ProblemInstance`` holding the function/operator
objects, the solver tags it is compatible with, and a pure validator mapping
a ``SolveResult`` to named residual diagnostics.  ``run_instance`` dispatches
an instance to a solver by tag.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import catalog, sets, solvers
from .core import (
    Array,
    InvalidInputError,
    InvalidParameterError,
    LinearMap,
    ProxFn,
    Schedule,
    SmoothFn,
    SolveResult,
    as_vector,
    matrix_map,
    identity_map,
    operator_norm,
    subgradient_certificate,
)

__all__ = [
    "ProblemInstance",
    "least_squares_smooth",
    "set_distance_smooth",
    "first_difference",
    "build_constrained_least_squares",
    "build_lasso",
    "build_alternating_projections",
    "build_best_approximation",
    "build_denoise",
    "build_tv1d",
    "build_feasibility",
    "run_instance",
    "lasso_kkt_residual",
    "grid_min_2d",
    "grid_best_approximation_oracle",
]


@dataclass(frozen=True)
class ProblemInstance:
    """A bundle of problem components, recommended solver tags, and a pure
    validator producing named residual diagnostics for a solve result."""

    tag: str
    dim: int
    components: dict
    solver_tags: tuple
    validator: Callable[[SolveResult], dict]
    seed: int | None = None


def least_squares_smooth(L: LinearMap, y) -> SmoothFn:
    """(1/2)||L x - y||^2 with gradient L^T(Lx - y) and beta = ||L||^2."""
    y = as_vector(y, L.rows)
    beta = operator_norm(L) ** 2
    if beta == 0.0:
        raise InvalidParameterError("least-squares term needs a nonzero operator")
    return SmoothFn(
        dim=L.cols,
        value=lambda x: 0.5 * float(np.linalg.norm(L.apply(x) - y) ** 2),
        grad_impl=lambda x: L.adjoint(L.apply(x) - y),
        lipschitz=beta,
        name="least_squares",
    )


def set_distance_smooth(C) -> SmoothFn:
    """(1/2) d_C^2 as a smooth term: gradient x - P_C x, Lipschitz constant 1."""
    return SmoothFn(
        dim=C.dim,
        value=lambda x: 0.5 * C.distance(x) ** 2,
        grad_impl=lambda x: x - C.project(x),
        lipschitz=1.0,
        name="half_sq_distance",
    )


def zero_smooth(dim: int, beta: float = 1.0) -> SmoothFn:
    """The zero function as a SmoothFn (beta is a formal constant)."""
    return SmoothFn(dim=dim, value=lambda x: 0.0, grad_impl=lambda x: np.zeros(dim), lipschitz=beta, name="zero")


def first_difference(n: int) -> LinearMap:
    """The (n-1) x n forward-difference operator x |-> (x_{k+1} - x_k)_k."""
    if n < 2:
        raise InvalidParameterError("first difference needs length >= 2")
    D = np.zeros((n - 1, n))
    for k in range(n - 1):
        D[k, k] = -1.0
        D[k, k + 1] = 1.0
    return matrix_map(D, name="first_difference")


# ---------------------------------------------------------------------------
# oracles and residuals
# ---------------------------------------------------------------------------


def lasso_kkt_residual(A, y, weights, x, kink_tol: float = 1e-9) -> float:
    """Max coordinatewise distance of A^T(y - Ax) from the l1 subdifferential.

    Coordinates with |x_k| <= kink_tol are treated as zero, so correlations
    only need to fall inside [-w_k, w_k] there.
    """
    A = np.asarray(A, dtype=float)
    y = as_vector(y)
    w = as_vector(weights)
    x = as_vector(x)
    corr = A.T @ (y - A @ x)
    worst = 0.0
    for ck, wk, xk in zip(corr, w, x):
        if xk > kink_tol:
            worst = max(worst, abs(ck - wk))
        elif xk < -kink_tol:
            worst = max(worst, abs(ck + wk))
        else:
            worst = max(worst, max(abs(ck) - wk, 0.0))
    return worst


def grid_min_2d(F, center, halfwidth: float, rounds: int = 6, pts: int = 81) -> Array:
    """Coarse-to-fine grid minimizer of F over a square in R^2.

    Each round scans a pts x pts grid and re-centers a window three cells
    wide around the best point.  Intended as an independent brute-force
    oracle for desk-scale tests; F may return +inf (infeasible cells).
    """
    cx, cy = float(center[0]), float(center[1])
    h = float(halfwidth)
    best = None
    for _ in range(rounds):
        xs = np.linspace(cx - h, cx + h, pts)
        ys = np.linspace(cy - h, cy + h, pts)
        best_v = np.inf
        for xv in xs:
            for yv in ys:
                v = F(np.array([xv, yv]))
                if v < best_v:
                    best_v = v
                    best = (xv, yv)
        if best is None or not np.isfinite(best_v):
            raise InvalidInputError("grid oracle found no finite value")
        cx, cy = best
        h = 3.0 * (2.0 * h / (pts - 1))
    return np.array(best)


def grid_best_approximation_oracle(C, D, r, center=None, halfwidth: float = 4.0) -> Array:
    """Grid-search projection of r onto C ∩ D (2-D sets only)."""
    r = as_vector(r, 2)

    def F(p: Array) -> float:
        if not (C.contains(p, tol=1e-7) and D.contains(p, tol=1e-7)):
            return np.inf
        return float(np.linalg.norm(p - r) ** 2)

    return grid_min_2d(F, center if center is not None else np.zeros(2), halfwidth)


def _feasible_probes(sets_list, dim: int, count: int, seed: int) -> list:
    """Approximate members of the intersection, for variational-inequality checks."""
    rng = np.random.default_rng(seed)
    probes = []
    for _ in range(count):
        z = rng.standard_normal(dim) * 2.0
        for _ in range(60):
            for C in sets_list:
                z = C.project(z)
        probes.append(z)
    return probes


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------


def build_constrained_least_squares(L: LinearMap, y, C) -> ProblemInstance:
    """min (1/2)||L x - y||^2 over x in C (projected Landweber family)."""
    y = as_vector(y, L.rows)
    f2 = least_squares_smooth(L, y)
    f1 = sets.indicator(C)
    if C.dim != L.cols:
        raise InvalidInputError("constraint set dimension must match the operator domain")

    def validator(result: SolveResult) -> dict:
        x = result.final_x
        residual = float(np.linalg.norm(x - C.project(x - f2.grad(x))))
        return {"projected_gradient_residual": residual, "objective": f2.eval(x)}

    return ProblemInstance(
        tag="constrained_least_squares",
        dim=L.cols,
        components={"f1": f1, "f2": f2, "L": L, "y": y, "C": C},
        solver_tags=("forward_backward", "forward_backward_const", "fista"),
        validator=validator,
    )


def build_lasso(A, y, weights) -> ProblemInstance:
    """min sum_k w_k |x_k| + (1/2)||A x - y||^2 in the canonical basis.

    Besides the forward-backward encoding (f1 = weighted l1, f2 smooth), the
    components carry a prox form of the quadratic for Douglas-Rachford, a
    three-way split for PPXA (with an inactive box bound), and the two-block
    SDMM encoding.
    """
    A = np.asarray(A, dtype=float)
    y = as_vector(y, A.shape[0])
    n = A.shape[1]
    w = as_vector(weights)
    if w.size == 1:
        w = np.full(n, float(w[0]))
    if w.size != n or np.any(w <= 0):
        raise InvalidParameterError("lasso needs one positive weight per coordinate")
    Lmap = matrix_map(A, name="A")
    f1 = catalog.weighted_l1(w)
    f2 = least_squares_smooth(Lmap, y)
    f2_prox = catalog.quadratic(Lmap, y, 1.0)
    box = sets.Box(np.full(n, -10.0), np.full(n, 10.0))

    def validator(result: SolveResult) -> dict:
        return {"kkt_residual": lasso_kkt_residual(A, y, w, result.final_x)}

    return ProblemInstance(
        tag="lasso",
        dim=n,
        components={
            "A": Lmap,
            "y": y,
            "weights": w,
            "f1": f1,
            "f2": f2,
            "f2_prox": f2_prox,
            "ppxa_f_list": [f2_prox, f1, sets.indicator(box)],
            "ppxa_weights": np.full(3, 1.0 / 3.0),
            "sdmm_g_list": [catalog.quadratic_deviation(y), f1],
            "sdmm_L_list": [Lmap, identity_map(n)],
        },
        solver_tags=(
            "forward_backward",
            "forward_backward_const",
            "fista",
            "douglas_rachford",
            "ppxa",
            "sdmm",
        ),
        validator=validator,
    )


def build_alternating_projections(C, D) -> ProblemInstance:
    """min (1/2) d_D^2(x) over x in C, via the Moreau envelope of the
    indicator of D (gradient x - P_D x, Lipschitz constant 1).  One of C, D
    should be bounded for a minimizer to exist (documented, not checked)."""
    if C.dim != D.dim:
        raise InvalidInputError("both sets must share one dimension")
    f1 = sets.indicator(C)
    f2 = set_distance_smooth(D)

    def validator(result: SolveResult) -> dict:
        x = result.final_x
        return {
            "fixed_point_residual": float(np.linalg.norm(x - C.project(D.project(x)))),
            "distance_C": C.distance(x),
        }

    return ProblemInstance(
        tag="alternating_projections",
        dim=C.dim,
        components={"f1": f1, "f2": f2, "f2_prox": catalog.squared_distance(sets.indicator(D)), "C": C, "D": D},
        solver_tags=("forward_backward", "douglas_rachford"),
        validator=validator,
    )


def build_best_approximation(C, D, r) -> ProblemInstance:
    """Projection of r onto C ∩ D through the Dykstra-like algorithm."""
    if C.dim != D.dim:
        raise InvalidInputError("both sets must share one dimension")
    r = as_vector(r, C.dim)

    def validator(result: SolveResult) -> dict:
        x = result.final_x
        probes = _feasible_probes([C, D], C.dim, 64, seed=5)
        vi = max((float((r - x) @ (p - x)) for p in probes), default=0.0)
        return {
            "distance_C": C.distance(x),
            "distance_D": D.distance(x),
            "vi_violation": max(vi, 0.0),
        }

    return ProblemInstance(
        tag="best_approximation",
        dim=C.dim,
        components={"f": sets.indicator(C), "g": sets.indicator(D), "C": C, "D": D, "r": r},
        solver_tags=("dykstra_like", "parallel_dykstra"),
        validator=validator,
    )


def build_denoise(f: ProxFn, g: ProxFn, r) -> ProblemInstance:
    """min f(x) + g(x) + (1/2)||x - r||^2, i.e. prox_{f+g}(r)."""
    if f.dim != g.dim:
        raise InvalidInputError("f and g must share one dimension")
    r = as_vector(r, f.dim)

    def validator(result: SolveResult) -> dict:
        x = result.final_x
        combined = ProxFn(
            dim=f.dim,
            value=lambda v: f.eval(v) + g.eval(v),
            prox_impl=lambda gamma, v: v,
            name="f+g",
        )
        return {"prox_certificate": subgradient_certificate(combined, r, x, samples=128, radius=0.5, seed=3)}

    return ProblemInstance(
        tag="denoise",
        dim=f.dim,
        components={"f": f, "g": g, "r": r},
        solver_tags=("dykstra_like", "parallel_dykstra"),
        validator=validator,
    )


def _pairwise_tv(n: int, omega: float, offset: int) -> ProxFn:
    """omega * sum of |x_{k+1} - x_k| over disjoint pairs starting at offset,
    expressed in an orthonormal basis of pair means and pair gaps."""
    B = np.zeros((n, n))
    kinds = []
    col = 0
    used = set()
    s = 1.0 / np.sqrt(2.0)
    a = np.sqrt(2.0) * omega
    i = offset
    while i + 1 < n:
        B[i, col] = s
        B[i + 1, col] = s
        kinds.append(catalog.Interval())  # mean direction: free
        col += 1
        B[i, col] = -s
        B[i + 1, col] = s
        kinds.append(catalog.IntervalSupport(-a, a))  # gap direction: omega*|gap|
        col += 1
        used.update((i, i + 1))
        i += 2
    for j in range(n):
        if j not in used:
            B[j, col] = 1.0
            kinds.append(catalog.Interval())
            col += 1
    return catalog.basis_separable(kinds, B)


def build_tv1d(r, omega: float) -> ProblemInstance:
    """min omega * sum_k |x_{k+1} - x_k| + (1/2)||x - r||^2 on a 1-D signal.

    Two encodings: (a) the dual forward-backward form h(x) + g(Lx) +
    ||x - r||^2/2 with h = 0, g = omega*||.||_1, L the first difference; and
    (b) a PPXA split over even/odd pairwise terms with closed-form pairwise
    shrinkage plus the quadratic deviation term.
    """
    r = as_vector(r)
    n = r.size
    if n < 2:
        raise InvalidParameterError("tv1d needs signal length >= 2")
    omega = float(omega)
    if not (np.isfinite(omega) and omega > 0):
        raise InvalidParameterError(f"omega must be > 0, got {omega}")
    D = first_difference(n)
    Dmat = D.to_dense()
    dual = {
        "h": catalog.zero_fn(n),
        "g": catalog.weighted_l1(np.full(n - 1, omega)),
        "L": D,
        "r": r,
    }
    ppxa_encoding = {
        "f_list": [_pairwise_tv(n, omega, 0), _pairwise_tv(n, omega, 1), catalog.quadratic_deviation(r)],
        "weights": np.full(3, 1.0 / 3.0),
    }

    def validator(result: SolveResult) -> dict:
        x = result.final_x
        v = r - x  # must equal D^T u with u in omega * dsubdiff of ||Dx||_1
        u, *_ = np.linalg.lstsq(Dmat.T, v, rcond=None)
        gaps = Dmat @ x
        stationarity = float(np.linalg.norm(Dmat.T @ u - v))
        bound = float(max(np.max(np.abs(u)) - omega, 0.0))
        align = 0.0
        for uk, gk in zip(u, gaps):
            if abs(gk) > 1e-7:
                align = max(align, abs(uk - omega * np.sign(gk)))
        return {"stationarity": stationarity, "dual_bound": bound, "alignment": align}

    return ProblemInstance(
        tag="tv1d",
        dim=n,
        components={"r": r, "omega": omega, "dual": dual, "ppxa": ppxa_encoding},
        solver_tags=("dual_forward_backward", "ppxa"),
        validator=validator,
    )


def build_feasibility(sets_list) -> ProblemInstance:
    """find x in the intersection of the given sets (POCS)."""
    sets_list = list(sets_list)
    if not sets_list:
        raise InvalidInputError("feasibility needs at least one set")
    dim = sets_list[0].dim
    if any(C.dim != dim for C in sets_list):
        raise InvalidInputError("all sets must share one dimension")

    def validator(result: SolveResult) -> dict:
        x = result.final_x
        return {"max_distance": max(C.distance(x) for C in sets_list)}

    return ProblemInstance(
        tag="feasibility",
        dim=dim,
        components={"sets": sets_list},
        solver_tags=("pocs",),
        validator=validator,
    )


def run_instance(
    instance: ProblemInstance,
    solver_tag: str,
    schedule: Schedule | None = None,
    stop: solvers.StoppingRule | None = None,
    gamma: float = 1.0,
) -> SolveResult:
    """Dispatch an instance to one of its recommended solvers."""
    if solver_tag not in instance.solver_tags:
        raise InvalidInputError(
            f"solver '{solver_tag}' is not applicable to '{instance.tag}'; "
            f"compatible solvers: {', '.join(instance.solver_tags)}"
        )
    c = instance.components
    if solver_tag == "forward_backward":
        return solvers.forward_backward(c["f1"], c["f2"], schedule=schedule, stop=stop)
    if solver_tag == "forward_backward_const":
        return solvers.forward_backward_const(c["f1"], c["f2"], schedule=schedule, stop=stop)
    if solver_tag == "fista":
        return solvers.fista(c["f1"], c["f2"], stop=stop)
    if solver_tag == "douglas_rachford":
        return solvers.douglas_rachford(c["f1"], c["f2_prox"], gamma=gamma, schedule=schedule, stop=stop)
    if solver_tag == "dykstra_like":
        return solvers.dykstra_like(c["f"], c["g"], c["r"], stop=stop)
    if solver_tag == "parallel_dykstra":
        # the parallel objective is sum_i omega_i f_i + ||.-r||^2/2, so each
        # term is pre-divided by its weight to recover f + g + ||.-r||^2/2
        branches = [catalog.scaled(c["f"], 2.0), catalog.scaled(c["g"], 2.0)]
        return solvers.parallel_dykstra(branches, np.array([0.5, 0.5]), c["r"], stop=stop)
    if solver_tag == "dual_forward_backward":
        d = c["dual"]
        return solvers.dual_forward_backward(d["h"], d["g"], d["L"], d["r"], schedule=schedule, stop=stop)
    if solver_tag == "ppxa":
        enc = c.get("ppxa")
        f_list = enc["f_list"] if enc else c["ppxa_f_list"]
        weights = enc["weights"] if enc else c["ppxa_weights"]
        return solvers.ppxa(f_list, weights, gamma=gamma, schedule=schedule, stop=stop)
    if solver_tag == "sdmm":
        return solvers.sdmm(c["sdmm_g_list"], c["sdmm_L_list"], gamma=gamma, stop=stop)
    if solver_tag == "pocs":
        return solvers.pocs(c["sets"], stop=stop)
    raise InvalidInputError(f"unknown solver tag '{solver_tag}'")
