"""
Tests for the benchmark losses, the noise model and NMSE.
"""
from __future__ import annotations

import math

import numpy as np
import pytest

from app.models import ObjectiveKind
from app.services.errors import (
    ConfigurationError,
    DimensionMismatchError,
    UndefinedMetricError,
)
from app.services.objectives import (
    CustomLoss,
    FourthOrderLoss,
    FourthOrderSpec,
    Loss,
    NoisyObjective,
    QuadraticLoss,
    QuadraticSpec,
    evaluate_noisy,
    fourth_order_gradient,
    fourth_order_value,
    make_loss,
    nmse,
    quadratic_gradient,
    quadratic_value,
    upper_triangular_design,
)


def central_difference(fn, theta, h=1e-6):
    gradient = np.zeros_like(theta)
    for i in range(theta.size):
        step = np.zeros_like(theta)
        step[i] = h
        gradient[i] = (fn(theta + step) - fn(theta - step)) / (2 * h)
    return gradient


@pytest.fixture
def quadratic():
    return QuadraticSpec.benchmark(10)


@pytest.fixture
def fourth_order():
    return FourthOrderSpec.benchmark(10)


class TestBenchmarkLosses:
    def test_design_matrix(self):
        A = upper_triangular_design(3)
        np.testing.assert_allclose(A, np.array([[1, 1, 1], [0, 1, 1], [0, 0, 1]]) / 3)

    def test_quadratic_at_ones(self, quadratic):
        assert quadratic_value(quadratic, np.ones(10)) == pytest.approx(15.5)

    def test_fourth_order_at_ones(self, fourth_order):
        assert fourth_order_value(fourth_order, np.ones(10)) == pytest.approx(4.177833, abs=1e-6)

    def test_quadratic_optimum(self, quadratic):
        np.testing.assert_allclose(quadratic.theta_star, -10.0 / 11.0 * np.ones(10), atol=1e-12)
        np.testing.assert_allclose(quadratic_gradient(quadratic, quadratic.theta_star), 0.0, atol=1e-12)

    def test_fourth_order_optimum_is_origin(self, fourth_order):
        np.testing.assert_array_equal(fourth_order.theta_star, np.zeros(10))
        assert fourth_order_value(fourth_order, np.zeros(10)) == 0.0

    def test_fourth_order_is_non_negative_along_rays(self, fourth_order):
        rng = np.random.default_rng(11)
        for _ in range(200):
            direction = rng.normal(size=10)
            for t in np.linspace(-20.0, 20.0, 81):
                assert fourth_order_value(fourth_order, t * direction) >= 0.0

    def test_fourth_order_is_non_negative_on_the_box(self, fourth_order):
        # every theta with |A theta|_inf <= 7.5 is A^-1 x for such an x
        rng = np.random.default_rng(12)
        for x in rng.uniform(-7.5, 7.5, size=(500, 10)):
            theta = np.linalg.solve(fourth_order.A, x)
            assert fourth_order_value(fourth_order, theta) >= 0.0

    def test_gradients_match_finite_differences(self, quadratic, fourth_order):
        theta = np.random.default_rng(5).normal(size=10)

        for value, gradient in (
            (lambda t: quadratic_value(quadratic, t), quadratic_gradient(quadratic, theta)),
            (lambda t: fourth_order_value(fourth_order, t), fourth_order_gradient(fourth_order, theta)),
        ):
            numeric = central_difference(value, theta)
            assert np.linalg.norm(numeric - gradient) <= 1e-6 * max(1.0, np.linalg.norm(gradient))

    def test_dimension_mismatch(self, quadratic, fourth_order):
        with pytest.raises(DimensionMismatchError):
            quadratic_value(quadratic, np.ones(9))
        with pytest.raises(DimensionMismatchError):
            fourth_order_value(fourth_order, np.ones(11))

    def test_mismatched_b_rejected(self):
        with pytest.raises(DimensionMismatchError):
            QuadraticSpec(A=np.eye(3), b=np.ones(2))

    @pytest.mark.parametrize(
        "kind, expected", [(ObjectiveKind.QUADRATIC, QuadraticLoss), (ObjectiveKind.FOURTH_ORDER, FourthOrderLoss)]
    )
    def test_make_loss(self, kind, expected):
        loss = make_loss(kind, 4)

        assert isinstance(loss, expected)
        assert isinstance(loss, Loss)
        assert loss.dimension == 4


class TestCustomLoss:
    def test_wraps_user_function(self):
        loss = CustomLoss(dimension=2, value_fn=lambda t: float(t @ t), theta_star=np.zeros(2))

        assert loss.value(np.array([3.0, 4.0])) == 25.0
        assert isinstance(loss, Loss)

    def test_checks_dimension(self):
        loss = CustomLoss(dimension=2, value_fn=lambda t: 0.0)
        with pytest.raises(DimensionMismatchError):
            loss.value(np.ones(3))


class TestNoisyObjective:
    """Tests for the additive [theta, 1] z noise model."""

    def test_noise_free_returns_exact_loss(self, quadratic):
        objective = NoisyObjective(QuadraticLoss(quadratic), noise_sigma=0.0, seed=1)

        assert evaluate_noisy(objective, np.ones(10)) == quadratic_value(quadratic, np.ones(10))
        assert objective.evaluations == 1

    def test_counter_increments_once_per_call(self, quadratic):
        objective = NoisyObjective(QuadraticLoss(quadratic), noise_sigma=0.01, seed=1)

        for _ in range(7):
            objective.evaluate(np.ones(10))

        assert objective.evaluations == 7

    def test_noise_is_unbiased(self, quadratic):
        # Arrange
        sigma, calls = 0.01, 100_000
        theta = np.linspace(-1.0, 1.0, 10)
        objective = NoisyObjective(QuadraticLoss(quadratic), noise_sigma=sigma, seed=123)

        # Act
        samples = np.array([objective.evaluate(theta) for _ in range(calls)])

        # Assert
        scale = sigma * math.sqrt(theta @ theta + 1.0)
        assert abs(samples.mean() - quadratic_value(quadratic, theta)) < 4 * scale / math.sqrt(calls)

    def test_variance_at_origin_is_sigma_squared(self, fourth_order):
        sigma = 0.01
        objective = NoisyObjective(FourthOrderLoss(fourth_order), noise_sigma=sigma, seed=4)

        samples = np.array([objective.evaluate(np.zeros(10)) for _ in range(100_000)])

        assert samples.var(ddof=1) == pytest.approx(sigma ** 2, rel=0.05)

    def test_same_seed_same_noise(self, quadratic):
        first = NoisyObjective(QuadraticLoss(quadratic), noise_sigma=0.01, seed=8)
        second = NoisyObjective(QuadraticLoss(quadratic), noise_sigma=0.01, seed=8)

        assert [first.evaluate(np.ones(10)) for _ in range(5)] == [
            second.evaluate(np.ones(10)) for _ in range(5)
        ]

    def test_negative_sigma_rejected(self, quadratic):
        with pytest.raises(ConfigurationError):
            NoisyObjective(QuadraticLoss(quadratic), noise_sigma=-0.1)


class TestNmse:
    def test_zero_at_optimum_and_one_at_start(self):
        theta0, theta_star = np.ones(3), np.zeros(3)

        assert nmse(theta_star, theta0, theta_star) == 0.0
        assert nmse(theta0, theta0, theta_star) == 1.0

    def test_ratio_of_squared_distances(self):
        assert nmse(np.array([0.5, 0.0]), np.array([2.0, 0.0]), np.zeros(2)) == pytest.approx(0.0625)

    def test_undefined_when_start_is_optimum(self):
        with pytest.raises(UndefinedMetricError):
            nmse(np.ones(2), np.zeros(2), np.zeros(2))
