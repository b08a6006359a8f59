"""Shared test utilities: randomized draw generators for every scalar prox
kind (with oracle brackets proven to contain the prox), an independent 2-D
grid prox oracle, and the calculus-rule verification suite."""

from __future__ import annotations

import math

import numpy as np

from proxsplit import catalog as cat
from proxsplit import sets
from proxsplit.core import matrix_map
from proxsplit.problems import grid_min_2d
from proxsplit.scalar import Bracket, scalar_prox_oracle

KIND_NAMES = [
    "interval",
    "interval_support",
    "smooth_plus_support",
    "deadzone",
    "power_abs",
    "huber",
    "abs_quad_power",
    "abs_minus_log",
    "linear_nonneg",
    "neg_root",
    "inverse_power",
    "entropy",
    "log_threshold",
    "log_quadratic",
    "log_inverse",
    "log_power",
    "interval_log_barrier",
]


def draw_case(name, rng):
    """One randomized (kind, x, gamma, oracle bracket) case.

    Brackets are derived from per-kind prox bounds so they always contain the
    true prox.
    """
    g = float(rng.uniform(0.2, 4.0))
    x = float(rng.uniform(-8.0, 8.0))
    if name == "interval":
        lo = float(rng.uniform(-3.0, 0.0))
        hi = lo + float(rng.uniform(0.2, 3.0))
        return cat.Interval(lo, hi), x, g, Bracket(lo, hi)
    if name == "interval_support":
        lo = float(rng.uniform(-3.0, 0.5))
        hi = lo + float(rng.uniform(0.2, 3.0))
        w = abs(x) + g * (abs(lo) + abs(hi)) + 1.0
        return cat.IntervalSupport(lo, hi), x, g, Bracket(-w, w)
    if name == "smooth_plus_support":
        if rng.random() < 0.5:
            psi = cat.PowerAbs(float(rng.uniform(0.1, 2.0)), float(rng.uniform(1.5, 3.0)))
        else:
            psi = cat.Huber(float(rng.uniform(0.1, 2.0)), float(rng.uniform(0.2, 2.0)))
        lo = float(rng.uniform(-2.0, 0.0))
        hi = lo + float(rng.uniform(0.2, 2.5))
        w = abs(x) + g * (abs(lo) + abs(hi)) + 1.0
        return cat.SmoothPlusSupport(psi, lo, hi), x, g, Bracket(-w, w)
    if name == "deadzone":
        return cat.Deadzone(float(rng.uniform(0.1, 3.0))), x, g, Bracket(-abs(x) - 1, abs(x) + 1)
    if name == "power_abs":
        kind = cat.PowerAbs(float(rng.uniform(0.1, 3.0)), float(rng.uniform(1.2, 3.5)))
        return kind, x, g, Bracket(-abs(x) - 1, abs(x) + 1)
    if name == "huber":
        kind = cat.Huber(float(rng.uniform(0.1, 3.0)), float(rng.uniform(0.1, 3.0)))
        return kind, x, g, Bracket(-abs(x) - 1, abs(x) + 1)
    if name == "abs_quad_power":
        kind = cat.AbsQuadPower(
            float(rng.uniform(0.1, 2.0)),
            float(rng.uniform(0.0, 2.0)),
            float(rng.uniform(0.1, 2.0)),
            float(rng.uniform(1.2, 3.5)),
        )
        return kind, x, g, Bracket(-abs(x) - 1, abs(x) + 1)
    if name == "abs_minus_log":
        kind = cat.AbsMinusLog(float(rng.uniform(0.1, 3.0)))
        return kind, x, g, Bracket(-abs(x) - 1, abs(x) + 1)
    if name == "linear_nonneg":
        kind = cat.LinearNonneg(float(rng.uniform(0.1, 3.0)))
        return kind, x, g, Bracket(-1.0, abs(x) + 1.0)
    if name == "neg_root":
        omega = float(rng.uniform(0.1, 3.0))
        q = float(rng.uniform(1.2, 3.5))
        hi = abs(x) + g * omega / q + 2.0
        return cat.NegRoot(omega, q), x, g, Bracket(0.0, hi)
    if name == "inverse_power":
        omega = float(rng.uniform(0.1, 3.0))
        q = float(rng.uniform(1.2, 3.5))
        hi = abs(x) + g * q * omega + 2.0
        return cat.InversePower(omega, q), x, g, Bracket(1e-8, hi)
    if name == "entropy":
        return cat.Entropy(), x, g, Bracket(0.0, max(abs(x), 1.0) + 2.0)
    if name == "log_threshold":
        lo = float(rng.uniform(-3.0, -0.3))
        hi = float(rng.uniform(0.3, 3.0))
        pad = 1e-6 * (hi - lo)
        return cat.LogThreshold(lo, hi), x, g, Bracket(lo + pad, hi - pad)
    if name == "log_quadratic":
        kappa = float(rng.uniform(0.1, 3.0))
        tau = float(rng.uniform(0.0, 2.0))
        alpha = float(rng.uniform(-2.0, 2.0))
        hi = abs(x) + g * abs(alpha) + math.sqrt(g * kappa) + 2.0
        return cat.LogQuadratic(kappa, tau, alpha), x, g, Bracket(1e-8, hi)
    if name == "log_inverse":
        kappa = float(rng.uniform(0.1, 3.0))
        alpha = float(rng.uniform(-2.0, 2.0))
        omega = float(rng.uniform(0.1, 3.0))
        hi = abs(x) + g * (abs(alpha) + kappa + omega) + 2.0
        return cat.LogInverse(kappa, alpha, omega), x, g, Bracket(1e-8, hi)
    if name == "log_power":
        kappa = float(rng.uniform(0.1, 3.0))
        omega = float(rng.uniform(0.1, 3.0))
        q = float(rng.uniform(1.2, 3.5))
        hi = abs(x) + g * kappa + 2.0
        return cat.LogPower(kappa, omega, q), x, g, Bracket(1e-8, hi)
    if name == "interval_log_barrier":
        lo = float(rng.uniform(-3.0, 1.0))
        hi = lo + float(rng.uniform(0.5, 4.0))
        k_lo = float(rng.uniform(0.1, 2.0))
        k_hi = float(rng.uniform(0.1, 2.0))
        pad = 1e-6 * (hi - lo)
        return cat.IntervalLogBarrier(lo, hi, k_lo, k_hi), x, g, Bracket(lo + pad, hi - pad)
    raise KeyError(name)


def oracle_prox(kind, x: float, gamma: float, bracket: Bracket) -> float:
    return scalar_prox_oracle(lambda p: gamma * kind.value(p), x, bracket, tol=1e-13)


def scalar_kind_max_error(name: str, draws: int = 100, seed: int = 0) -> float:
    rng = np.random.default_rng(seed + hash(name) % 10_000)
    worst = 0.0
    for _ in range(draws):
        kind, x, g, bracket = draw_case(name, rng)
        worst = max(worst, abs(kind.prox(x, g) - oracle_prox(kind, x, g, bracket)))
    return worst


def grid_prox_2d(f, x, gamma: float = 1.0, halfwidth: float = 6.0) -> np.ndarray:
    """Independent brute-force prox oracle on R^2 (coarse-to-fine grid)."""
    x = np.asarray(x, dtype=float)

    def objective(p: np.ndarray) -> float:
        return gamma * f.eval(p) + 0.5 * float(np.linalg.norm(x - p) ** 2)

    return grid_min_2d(objective, x, halfwidth)


def _soft(x: float, level: float) -> float:
    if x > level:
        return x - level
    if x < -level:
        return x + level
    return 0.0


def _rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def calculus_rule_errors(seed: int = 0) -> dict:
    """Max |catalog prox - oracle| for each of the 16 calculus rules."""
    rng = np.random.default_rng(seed)
    errors = {}
    abs1 = cat.separable(cat.IntervalSupport(-1.0, 1.0), dim=1)  # |t|

    # translation: z + prox(x - z), against per-coordinate golden section
    base = cat.separable(cat.IntervalSupport(-1.0, 1.0), dim=2)
    z = np.array([1.5, -0.7])
    shifted = cat.translated(base, z)
    worst = 0.0
    for _ in range(40):
        x = rng.uniform(-4, 4, size=2)
        g = float(rng.uniform(0.3, 3.0))
        p = shifted.prox(g, x)
        for i in range(2):
            w = abs(x[i]) + abs(z[i]) + g + 2
            ref = scalar_prox_oracle(lambda t, i=i: g * abs(t - z[i]), x[i], Bracket(-w, w), tol=1e-13)
            worst = max(worst, abs(p[i] - ref))
    errors["translation"] = worst

    # argument scaling: phi(x/rho) for phi = |.| equals |x|/|rho|
    worst = 0.0
    for _ in range(60):
        rho = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.3, 3.0))
        scaled = cat.arg_scaled(abs1, rho)
        x = float(rng.uniform(-5, 5))
        g = float(rng.uniform(0.3, 3.0))
        worst = max(worst, abs(scaled.prox(g, [x])[0] - _soft(x, g / abs(rho))))
    errors["scaling"] = worst

    # reflection of an asymmetric function, against golden section
    lin = cat.separable(cat.LinearNonneg(1.3), dim=1)
    refl = cat.reflected(lin)
    worst = 0.0
    for _ in range(60):
        x = float(rng.uniform(-5, 5))
        g = float(rng.uniform(0.3, 3.0))
        ref = scalar_prox_oracle(
            lambda p: g * ((-1.3) * p if p <= 0 else math.inf), x, Bracket(-abs(x) - 2, 1.0), tol=1e-13
        )
        worst = max(worst, abs(refl.prox(g, [x])[0] - ref))
    errors["reflection"] = worst

    # quadratic perturbation of |.|
    worst = 0.0
    for _ in range(40):
        alpha = float(rng.uniform(0.0, 2.0))
        u = float(rng.uniform(-1.5, 1.5))
        c = float(rng.uniform(-1.0, 1.0))
        pert = cat.quad_perturbed(abs1, alpha=alpha, u=[u], offset=c)
        x = float(rng.uniform(-5, 5))
        g = float(rng.uniform(0.3, 3.0))
        w = abs(x) + g * (1 + abs(u)) + 2
        ref = scalar_prox_oracle(
            lambda p: g * (abs(p) + 0.5 * alpha * p * p + u * p + c), x, Bracket(-w, w), tol=1e-13
        )
        worst = max(worst, abs(pert.prox(g, [x])[0] - ref))
    errors["quad_perturbation"] = worst

    # conjugation: (indicator [-1,1])* = |.|, so prox is the soft threshold
    box1 = cat.separable(cat.Interval(-1.0, 1.0), dim=1)
    conj = cat.conjugate(box1)
    worst = 0.0
    for _ in range(60):
        x = float(rng.uniform(-5, 5))
        g = float(rng.uniform(0.3, 3.0))
        worst = max(worst, abs(conj.prox(g, [x])[0] - _soft(x, g)))
    # biconjugation returns the original prox
    biconj = cat.conjugate(conj)
    for _ in range(20):
        x = float(rng.uniform(-5, 5))
        worst = max(worst, abs(biconj.prox(1.0, [x])[0] - box1.prox(1.0, [x])[0]))
    errors["conjugation"] = worst

    # squared distance to a box, against the 2-D grid oracle
    C = sets.Box(np.zeros(2), np.ones(2))
    sqd = cat.squared_distance(sets.indicator(C))
    worst = 0.0
    for _ in range(4):
        x = rng.uniform(-2.5, 2.5, size=2)
        g = float(rng.uniform(0.4, 2.5))
        worst = max(worst, float(np.max(np.abs(sqd.prox(g, x) - grid_prox_2d(sqd, x, g, halfwidth=5.0)))))
    errors["squared_distance"] = worst

    # Moreau envelope of an interval indicator equals d^2/2: same prox values
    env = cat.moreau_envelope(cat.separable(cat.Interval(0.0, 1.0), dim=1))
    sqd1 = cat.squared_distance(sets.indicator(sets.Box([0.0], [1.0])))
    worst = 0.0
    for _ in range(60):
        x = float(rng.uniform(-4, 4))
        g = float(rng.uniform(0.3, 3.0))
        worst = max(worst, abs(env.prox(g, [x])[0] - sqd1.prox(g, [x])[0]))
        ref = scalar_prox_oracle(lambda p: g * env.eval([p]), x, Bracket(-6.0, 6.0), tol=1e-13)
        worst = max(worst, abs(env.prox(g, [x])[0] - ref))
    errors["moreau_envelope"] = worst

    # Moreau complement of t^2/2: analytically 2x/3 at unit scale
    compl = cat.moreau_complement(cat.separable(cat.PowerAbs(0.5, 2.0), dim=1))
    worst = 0.0
    for _ in range(60):
        x = float(rng.uniform(-4, 4))
        g = float(rng.uniform(0.3, 3.0))
        ref = scalar_prox_oracle(lambda p: g * compl.eval([p]), x, Bracket(-6.0, 6.0), tol=1e-13)
        worst = max(worst, abs(compl.prox(g, [x])[0] - ref))
        worst = max(worst, abs(compl.prox(1.0, [x])[0] - 2.0 * x / 3.0))
    errors["moreau_complement"] = worst

    # decomposition in a rotated orthonormal basis.  Smooth kinds go against
    # the grid oracle; the kinked one-direction case |b1.x| has the
    # hand-derived closed form x + (soft(t) - t) b1 with t = b1.x, since the
    # orthogonal component is untouched by a function of b1.x alone.
    B = _rotation(0.61)
    deco = cat.basis_separable([cat.Huber(0.8, 1.1), cat.PowerAbs(0.7, 2.2)], B)
    worst = 0.0
    for _ in range(4):
        x = rng.uniform(-2.5, 2.5, size=2)
        g = float(rng.uniform(0.4, 2.5))
        worst = max(worst, float(np.max(np.abs(deco.prox(g, x) - grid_prox_2d(deco, x, g, halfwidth=6.0)))))
    a = 1.3
    deco_abs = cat.basis_separable([cat.IntervalSupport(-a, a), cat.Interval()], B)
    b1 = B[:, 0]
    for _ in range(40):
        x = rng.uniform(-3, 3, size=2)
        g = float(rng.uniform(0.3, 3.0))
        t = float(b1 @ x)
        expected = x + (_soft(t, g * a) - t) * b1
        worst = max(worst, float(np.max(np.abs(deco_abs.prox(g, x) - expected))))
    errors["decomposition"] = worst

    # semi-orthogonal composition with L = sqrt(2) * rotation (nu = 2): smooth
    # base against the grid oracle
    L = matrix_map(math.sqrt(2.0) * _rotation(0.37), tight_frame_nu=2.0)
    tf = cat.tight_frame_compose(cat.separable(cat.Huber(0.9, 1.2), dim=2), L)
    worst = 0.0
    for _ in range(4):
        x = rng.uniform(-2.0, 2.0, size=2)
        g = float(rng.uniform(0.4, 2.0))
        worst = max(worst, float(np.max(np.abs(tf.prox(g, x) - grid_prox_2d(tf, x, g, halfwidth=6.0)))))
    # row map [1, 1] with nu = 2: |x1 + x2| has the hand-derived closed form
    # p = x - ((s - soft(s, 2*gamma))/2) * (1, 1) with s = x1 + x2, because the
    # objective splits along the diagonal and its orthogonal complement
    row = matrix_map(np.array([[1.0, 1.0]]), tight_frame_nu=2.0)
    tf_row = cat.tight_frame_compose(cat.separable(cat.IntervalSupport(-1.0, 1.0), dim=1), row)
    for _ in range(40):
        x = rng.uniform(-3.0, 3.0, size=2)
        g = float(rng.uniform(0.3, 3.0))
        s = float(x[0] + x[1])
        expected = x - 0.5 * (s - _soft(s, 2.0 * g)) * np.ones(2)
        worst = max(worst, float(np.max(np.abs(tf_row.prox(g, x) - expected))))
    errors["semi_orthogonal"] = worst

    # quadratic loss (weight/2)||Lx - y||^2, against the grid oracle
    A = rng.standard_normal((3, 2))
    yv = rng.standard_normal(3)
    quad = cat.quadratic(matrix_map(A), yv, weight=1.7)
    worst = 0.0
    for _ in range(4):
        x = rng.uniform(-2.0, 2.0, size=2)
        g = float(rng.uniform(0.4, 2.0))
        worst = max(worst, float(np.max(np.abs(quad.prox(g, x) - grid_prox_2d(quad, x, g, halfwidth=6.0)))))
    errors["quadratic_loss"] = worst

    # indicator: prox is the projection, scale-free
    ball = sets.Ball(np.zeros(2), 1.0)
    ind = sets.indicator(ball)
    worst = 0.0
    for _ in range(60):
        x = rng.uniform(-3, 3, size=2)
        g = float(rng.uniform(0.3, 5.0))
        nx = float(np.linalg.norm(x))
        expected = x if nx <= 1.0 else x / nx
        worst = max(worst, float(np.max(np.abs(ind.prox(g, x) - expected))))
    errors["indicator"] = worst

    # scaled distance to a ball: radial 1-D reduction gives the closed form
    # (move the radius r of x toward the ball radius R by the one-sided soft
    # rule), derived by hand from the rotational symmetry about the center
    w_dist = 0.9
    dist = cat.scaled_distance(ball, weight=w_dist)
    center, R = ball.center, ball.radius
    worst = 0.0
    for _ in range(40):
        x = rng.uniform(-3, 3, size=2)
        g = float(rng.uniform(0.3, 3.0))
        d = x - center
        rad = float(np.linalg.norm(d))
        if rad <= R:
            expected = x
        elif rad <= R + g * w_dist:
            expected = center + (R / rad) * d
        else:
            expected = center + ((rad - g * w_dist) / rad) * d
        worst = max(worst, float(np.max(np.abs(dist.prox(g, x) - expected))))
    dist0 = cat.scaled_distance(sets.point([0.0]), weight=1.0)
    for _ in range(40):
        x = float(rng.uniform(-5, 5))
        g = float(rng.uniform(0.3, 3.0))
        worst = max(worst, abs(dist0.prox(g, [x])[0] - _soft(x, g)))
    errors["distance"] = worst

    # smooth function of the distance, against the grid oracle
    pen = cat.distance_penalty(sets.Ball(np.array([0.3, -0.2]), 0.8), cat.Huber(1.0, 1.0))
    worst = 0.0
    for _ in range(4):
        x = rng.uniform(-3, 3, size=2)
        g = float(rng.uniform(0.4, 2.5))
        worst = max(worst, float(np.max(np.abs(pen.prox(g, x) - grid_prox_2d(pen, x, g, halfwidth=6.0)))))
    # phi = t^2/2 with C = {0} gives ||x||^2/2, prox x/(1+gamma)
    pen0 = cat.distance_penalty(sets.point(np.zeros(2)), cat.PowerAbs(0.5, 2.0))
    for _ in range(40):
        x = rng.uniform(-3, 3, size=2)
        g = float(rng.uniform(0.3, 3.0))
        worst = max(worst, float(np.max(np.abs(pen0.prox(g, x) - x / (1.0 + g)))))
    errors["distance_penalty"] = worst

    # support function of the unit box is the l1 norm
    sup = cat.support_function(sets.Box(-np.ones(2), np.ones(2)))
    worst = 0.0
    for _ in range(60):
        x = rng.uniform(-4, 4, size=2)
        g = float(rng.uniform(0.3, 3.0))
        expected = np.array([_soft(x[0], g), _soft(x[1], g)])
        worst = max(worst, float(np.max(np.abs(sup.prox(g, x) - expected))))
    errors["support"] = worst

    # radial thresholding: sigma_{0} + omega*||.|| is the block soft threshold
    thr = cat.support_plus_radial(sets.point(np.zeros(2)), cat.IntervalSupport(-1.3, 1.3))
    worst = 0.0
    for _ in range(60):
        x = rng.uniform(-4, 4, size=2)
        g = float(rng.uniform(0.3, 3.0))
        nx = float(np.linalg.norm(x))
        expected = np.zeros(2) if nx <= 1.3 * g else (1.0 - 1.3 * g / nx) * x
        worst = max(worst, float(np.max(np.abs(thr.prox(g, x) - expected))))
    # deadzone radial part exercises the max-Argmin branch; sigma_{0} = 0, so
    # by rotational symmetry the prox reduces to the 1-D radial prox, taken
    # here from the golden-section oracle
    dz = cat.Deadzone(0.5)
    thr2 = cat.support_plus_radial(sets.point(np.zeros(2)), dz, argmin_max=0.5)
    for _ in range(40):
        x = rng.uniform(-3, 3, size=2)
        g = float(rng.uniform(0.4, 2.0))
        rad = float(np.linalg.norm(x))
        pref = scalar_prox_oracle(lambda t: g * dz.value(t), rad, Bracket(-rad - 1, rad + 1), tol=1e-13)
        expected = (pref / rad) * x if rad > 0 else x
        worst = max(worst, float(np.max(np.abs(thr2.prox(g, x) - expected))))
    # box support plus a quadratic radial part: axis-aligned kinks only, so
    # the grid oracle localizes sharply
    thr3 = cat.support_plus_radial(sets.Box(-np.ones(2), np.ones(2)), cat.PowerAbs(1.0, 2.0))
    for _ in range(4):
        x = rng.uniform(-3, 3, size=2)
        g = float(rng.uniform(0.4, 2.0))
        worst = max(worst, float(np.max(np.abs(thr3.prox(g, x) - grid_prox_2d(thr3, x, g, halfwidth=6.0)))))
    errors["thresholding"] = worst

    return errors


def catalog_zoo() -> list:
    """One ProxFn instance per scalar kind and per calculus constructor, used
    by the firm-nonexpansiveness and certificate sweeps."""
    rng = np.random.default_rng(123)
    zoo = []
    for name in KIND_NAMES:
        kind, _, _, _ = draw_case(name, rng)
        zoo.append(cat.separable(kind, dim=2))
    box = sets.Box(-np.ones(2), np.ones(2))
    ball = sets.Ball(np.array([0.2, -0.1]), 1.5)
    abs2 = cat.separable(cat.IntervalSupport(-1.0, 1.0), dim=2)
    zoo += [
        cat.translated(abs2, np.array([0.4, -1.1])),
        cat.arg_scaled(abs2, -1.7),
        cat.reflected(cat.separable(cat.LinearNonneg(0.8), dim=2)),
        cat.quad_perturbed(abs2, alpha=0.7, u=np.array([0.3, -0.2]), offset=0.5),
        cat.conjugate(sets.indicator(box), value_fn=box.support),
        cat.conjugate(abs2, value_fn=lambda x: 0.0 if np.max(np.abs(x)) <= 1.0 + 1e-12 else np.inf),
        cat.moreau_envelope(abs2),
        cat.moreau_complement(cat.separable(cat.PowerAbs(0.5, 2.0), dim=2)),
        cat.squared_distance(sets.indicator(ball)),
        cat.basis_separable([cat.IntervalSupport(-1.0, 1.0), cat.Interval(-0.5, 2.0)], _rotation(0.61)),
        cat.tight_frame_compose(abs2, matrix_map(math.sqrt(2.0) * _rotation(0.37), tight_frame_nu=2.0)),
        cat.quadratic(matrix_map(rng.standard_normal((3, 2))), rng.standard_normal(3), weight=1.2),
        cat.quadratic_deviation(np.array([0.5, -0.25]), weight=2.0),
        cat.scaled_distance(ball, weight=0.9),
        cat.distance_penalty(ball, cat.Huber(1.0, 1.0)),
        cat.support_function(box),
        cat.support_plus_radial(sets.point(np.zeros(2)), cat.IntervalSupport(-1.3, 1.3)),
        cat.stacked([cat.separable(cat.IntervalSupport(-1.0, 1.0), dim=1), sets.indicator(sets.Box([0.0], [1.0]))]),
        sets.indicator(box),
        sets.indicator(ball),
        sets.indicator(sets.Halfspace(np.array([1.0, 1.0]), 0.5)),
        sets.indicator(sets.Hyperplane(np.array([1.0, -2.0]), 1.0)),
        sets.indicator(sets.AffineSubspace(np.array([[1.0, 1.0]]), np.array([1.0]))),
        sets.indicator(sets.orthant(2)),
        cat.zero_fn(2),
    ]
    return zoo
