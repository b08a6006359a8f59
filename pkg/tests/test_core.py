import numpy as np
import pytest

from proxsplit import catalog as cat
from proxsplit import sets
from proxsplit.core import (
    InvalidInputError,
    InvalidParameterError,
    LinearMap,
    SmoothFn,
    as_vector,
    check_adjoint,
    firm_nonexpansiveness_violation,
    gradient_check_error,
    identity_map,
    matrix_map,
    operator_norm,
    prox_of,
    sequence_value,
    subgradient_certificate,
)


class TestVectors:
    def test_rejects_nan(self):
        with pytest.raises(InvalidInputError):
            as_vector([1.0, np.nan])

    def test_rejects_inf(self):
        with pytest.raises(InvalidInputError):
            as_vector([np.inf])

    def test_dimension_check(self):
        with pytest.raises(InvalidInputError):
            as_vector([1.0, 2.0], dim=3)

    def test_scalar_promotes(self):
        assert as_vector(2.0).shape == (1,)


class TestProxOf:
    def test_box_projection(self):
        f = sets.indicator(sets.Box([0.0], [1.0]))
        assert prox_of(f, 1.0, [2.0])[0] == pytest.approx(1.0)

    def test_fixed_point_at_minimizer(self):
        f = cat.separable(cat.IntervalSupport(-1.0, 1.0), dim=1)  # |t|, minimized at 0
        assert prox_of(f, 1.0, [0.0])[0] == 0.0

    def test_soft_threshold(self):
        f = cat.separable(cat.IntervalSupport(-1.0, 1.0), dim=1)
        assert prox_of(f, 1.0, [3.0])[0] == pytest.approx(2.0)

    def test_rejects_nonfinite_input(self):
        f = cat.zero_fn(2)
        with pytest.raises(InvalidInputError):
            prox_of(f, 1.0, [np.nan, 0.0])

    def test_rejects_bad_gamma(self):
        f = cat.zero_fn(1)
        with pytest.raises(InvalidInputError):
            prox_of(f, -1.0, [0.0])


class TestSubgradientCertificate:
    def test_box_indicator(self):
        f = sets.indicator(sets.Box([0.0], [1.0]))
        v = subgradient_certificate(f, [2.0], [1.0], ys=[[0.0], [0.5], [1.0]])
        assert v <= 1e-12

    def test_abs_correct_prox(self):
        f = cat.separable(cat.IntervalSupport(-1.0, 1.0), dim=1)
        v = subgradient_certificate(f, [3.0], [2.0], ys=[[-1.0], [0.0], [5.0]])
        assert v <= 1e-12

    def test_abs_wrong_prox_flagged(self):
        f = cat.separable(cat.IntervalSupport(-1.0, 1.0), dim=1)
        v = subgradient_certificate(f, [3.0], [2.5], ys=[[2.0]])
        assert v > 0.0


class TestOperatorNorm:
    def test_identity(self):
        assert operator_norm(identity_map(3)) == pytest.approx(1.0, rel=1e-8)

    def test_diagonal(self):
        L = matrix_map(np.diag([3.0, 1.0]))
        assert operator_norm(L) == pytest.approx(3.0, rel=1e-8)

    def test_nilpotent(self):
        L = matrix_map(np.array([[0.0, 2.0], [0.0, 0.0]]))
        assert operator_norm(L) == pytest.approx(2.0, rel=1e-8)

    def test_zero_map(self):
        L = matrix_map(np.zeros((2, 2)))
        assert operator_norm(L) == 0.0

    def test_deterministic(self):
        rng = np.random.default_rng(4)
        L = matrix_map(rng.standard_normal((5, 4)))
        assert operator_norm(L, seed=7) == operator_norm(L, seed=7)


class TestAdjoint:
    def test_consistent_matrix(self):
        rng = np.random.default_rng(0)
        L = matrix_map(rng.standard_normal((4, 3)))
        assert check_adjoint(L) <= 1e-12

    def test_wrong_adjoint_detected(self):
        A = np.array([[1.0, 2.0], [0.0, 1.0]])
        L = LinearMap(2, 2, lambda x: A @ x, lambda u: A @ u)  # adjoint should be A.T
        assert check_adjoint(L) > 1e-3

    def test_zero_map(self):
        L = matrix_map(np.zeros((3, 2)))
        assert check_adjoint(L) == 0.0


class TestTightFrameDeclaration:
    def test_valid(self):
        matrix_map(np.sqrt(2.0) * np.eye(2), tight_frame_nu=2.0)

    def test_invalid_rejected(self):
        with pytest.raises(InvalidParameterError):
            matrix_map(np.array([[1.0, 0.5], [0.0, 1.0]]), tight_frame_nu=1.0)


class TestSmoothInterface:
    def test_gradient_check(self):
        rng = np.random.default_rng(1)
        A = rng.standard_normal((4, 3))
        y = rng.standard_normal(4)
        f = SmoothFn(
            dim=3,
            value=lambda x: 0.5 * float(np.linalg.norm(A @ x - y) ** 2),
            grad_impl=lambda x: A.T @ (A @ x - y),
            lipschitz=float(np.linalg.norm(A, 2) ** 2),
        )
        for _ in range(5):
            assert gradient_check_error(f, rng.standard_normal(3)) <= 1e-7

    def test_distance_smoother_gradient(self):
        from proxsplit import sets
        from proxsplit.problems import set_distance_smooth

        f = set_distance_smooth(sets.Ball(np.zeros(2), 1.0))
        rng = np.random.default_rng(8)
        for _ in range(10):
            x = rng.standard_normal(2) * 3
            assert gradient_check_error(f, x) <= 1e-5

    def test_lipschitz_sampled(self):
        rng = np.random.default_rng(2)
        A = rng.standard_normal((4, 3))
        beta = float(np.linalg.norm(A, 2) ** 2)
        f = SmoothFn(
            dim=3,
            value=lambda x: 0.5 * float(x @ (A.T @ A @ x)),
            grad_impl=lambda x: A.T @ (A @ x),
            lipschitz=beta,
        )
        for _ in range(20):
            x, y = rng.standard_normal(3), rng.standard_normal(3)
            assert np.linalg.norm(f.grad(x) - f.grad(y)) <= beta * np.linalg.norm(x - y) + 1e-12

    def test_smooth_prox_characterization(self):
        # for differentiable f, x - p = gamma * grad f(p) at p = prox(gamma, x)
        rng = np.random.default_rng(3)
        A = rng.standard_normal((3, 3)) * 0.5
        y = rng.standard_normal(3)
        L = matrix_map(A)
        fprox = cat.quadratic(L, y, weight=1.0)
        fsmooth = SmoothFn(
            dim=3,
            value=lambda x: 0.5 * float(np.linalg.norm(A @ x - y) ** 2),
            grad_impl=lambda x: A.T @ (A @ x - y),
            lipschitz=float(np.linalg.norm(A, 2) ** 2),
        )
        for _ in range(10):
            x = rng.standard_normal(3)
            gamma = float(rng.uniform(0.3, 2.0))
            p = fprox.prox(gamma, x)
            assert np.linalg.norm(x - p - gamma * fsmooth.grad(p)) <= 1e-10


class TestFirmNonexpansiveness:
    def test_catalog_samples(self):
        rng = np.random.default_rng(5)
        fns = [
            cat.separable(cat.IntervalSupport(-1.0, 1.0), dim=2),
            sets.indicator(sets.Ball(np.zeros(2), 1.0)),
            cat.separable(cat.Entropy(), dim=2),
        ]
        for f in fns:
            for _ in range(50):
                x, y = rng.standard_normal(2) * 3, rng.standard_normal(2) * 3
                assert firm_nonexpansiveness_violation(f, x, y, gamma=1.0) <= 1e-9


class TestSchedule:
    def test_constant(self):
        assert sequence_value(0.5, 10) == 0.5

    def test_sequence_holds_last(self):
        assert sequence_value([0.1, 0.2], 5) == 0.2

    def test_callable(self):
        assert sequence_value(lambda n: 1.0 / (n + 1), 3) == 0.25
