"""
Benchmark losses, the additive measurement-noise model and the NMSE metric.

Both benchmark losses are built on the p x p design A = triu(ones)/p:

    quadratic     J(theta) = theta^T A theta + b^T theta,                 b = ones
    fourth-order  J(theta) = x^T x + 0.1 sum x^3 + 0.01 sum x^4,          x = A theta

Measurements add [theta^T, 1] z with z ~ N(0, sigma^2 I_{p+1}).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Protocol, runtime_checkable

import numpy as np

from app.models import ObjectiveKind
from app.services.errors import (
    ConfigurationError,
    DimensionMismatchError,
    InvalidDimensionError,
    UndefinedMetricError,
)


def upper_triangular_design(p: int) -> np.ndarray:
    if isinstance(p, bool) or not isinstance(p, (int, np.integer)) or p < 1:
        raise InvalidDimensionError(p)
    return np.triu(np.ones((p, p))) / p


@dataclass(frozen=True, eq=False)
class QuadraticSpec:
    A: np.ndarray
    b: np.ndarray

    def __post_init__(self) -> None:
        A = np.asarray(self.A, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ConfigurationError("A must be a square matrix.")
        if b.shape != (A.shape[0],):
            raise DimensionMismatchError(A.shape[0], b.size, what="b")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def dimension(self) -> int:
        return self.A.shape[0]

    @cached_property
    def theta_star(self) -> np.ndarray:
        """Stationary point, the solution of (A + A^T) theta = -b."""
        return np.linalg.solve(self.A + self.A.T, -self.b)

    @classmethod
    def benchmark(cls, p: int) -> QuadraticSpec:
        return cls(A=upper_triangular_design(p), b=np.ones(p))


@dataclass(frozen=True, eq=False)
class FourthOrderSpec:
    A: np.ndarray

    def __post_init__(self) -> None:
        A = np.asarray(self.A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ConfigurationError("A must be a square matrix.")
        object.__setattr__(self, "A", A)

    @property
    def dimension(self) -> int:
        return self.A.shape[0]

    @cached_property
    def theta_star(self) -> np.ndarray:
        return np.zeros(self.dimension)

    @classmethod
    def benchmark(cls, p: int) -> FourthOrderSpec:
        return cls(A=upper_triangular_design(p))


def quadratic_value(spec: QuadraticSpec, theta: np.ndarray) -> float:
    theta = _as_point(theta, spec.dimension)
    return float(theta @ spec.A @ theta + spec.b @ theta)


def quadratic_gradient(spec: QuadraticSpec, theta: np.ndarray) -> np.ndarray:
    theta = _as_point(theta, spec.dimension)
    return (spec.A + spec.A.T) @ theta + spec.b


def fourth_order_value(spec: FourthOrderSpec, theta: np.ndarray) -> float:
    x = spec.A @ _as_point(theta, spec.dimension)
    return float(x @ x + 0.1 * np.sum(x**3) + 0.01 * np.sum(x**4))


def fourth_order_gradient(spec: FourthOrderSpec, theta: np.ndarray) -> np.ndarray:
    x = spec.A @ _as_point(theta, spec.dimension)
    return spec.A.T @ (2.0 * x + 0.3 * x**2 + 0.04 * x**3)


@runtime_checkable
class Loss(Protocol):
    """A deterministic loss with a known minimiser."""

    @property
    def dimension(self) -> int: ...

    @property
    def theta_star(self) -> Optional[np.ndarray]: ...

    def value(self, theta: np.ndarray) -> float: ...


@dataclass(frozen=True, eq=False)
class QuadraticLoss:
    spec: QuadraticSpec

    @property
    def dimension(self) -> int:
        return self.spec.dimension

    @property
    def theta_star(self) -> np.ndarray:
        return self.spec.theta_star

    def value(self, theta: np.ndarray) -> float:
        return quadratic_value(self.spec, theta)

    def gradient(self, theta: np.ndarray) -> np.ndarray:
        return quadratic_gradient(self.spec, theta)


@dataclass(frozen=True, eq=False)
class FourthOrderLoss:
    spec: FourthOrderSpec

    @property
    def dimension(self) -> int:
        return self.spec.dimension

    @property
    def theta_star(self) -> np.ndarray:
        return self.spec.theta_star

    def value(self, theta: np.ndarray) -> float:
        return fourth_order_value(self.spec, theta)

    def gradient(self, theta: np.ndarray) -> np.ndarray:
        return fourth_order_gradient(self.spec, theta)


@dataclass(frozen=True, eq=False)
class CustomLoss:
    """User-supplied loss; theta_star is optional and only needed for NMSE."""

    dimension: int
    value_fn: Callable[[np.ndarray], float]
    theta_star: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        if isinstance(self.dimension, bool) or not isinstance(self.dimension, int) or self.dimension < 1:
            raise InvalidDimensionError(self.dimension)
        if self.theta_star is not None:
            object.__setattr__(self, "theta_star", _as_point(self.theta_star, self.dimension))

    def value(self, theta: np.ndarray) -> float:
        return float(self.value_fn(_as_point(theta, self.dimension)))


def make_loss(kind: ObjectiveKind, p: int) -> QuadraticLoss | FourthOrderLoss:
    if kind is ObjectiveKind.QUADRATIC:
        return QuadraticLoss(QuadraticSpec.benchmark(p))
    return FourthOrderLoss(FourthOrderSpec.benchmark(p))


@dataclass(eq=False)
class NoisyObjective:
    """
    Loss plus additive noise [theta^T, 1] z, with a fresh z per evaluation.

    The noise stream is the second child of the seed's SeedSequence; the first
    child drives random perturbation directions.
    """

    loss: Loss
    noise_sigma: float = 0.0
    seed: int = 0
    evaluations: int = field(default=0, init=False)
    _rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not self.noise_sigma >= 0:
            raise ConfigurationError(f"noise_sigma must be >= 0, got {self.noise_sigma!r}.")
        if self.seed < 0:
            raise ConfigurationError(f"seed must be >= 0, got {self.seed!r}.")
        self._rng = np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(1,)))

    @property
    def dimension(self) -> int:
        return self.loss.dimension

    @property
    def theta_star(self) -> Optional[np.ndarray]:
        return self.loss.theta_star

    def evaluate(self, theta: np.ndarray) -> float:
        return evaluate_noisy(self, theta)


def evaluate_noisy(obj: NoisyObjective, theta: np.ndarray) -> float:
    theta = _as_point(theta, obj.dimension)
    value = obj.loss.value(theta)
    obj.evaluations += 1
    if obj.noise_sigma == 0:
        return value
    z = obj._rng.normal(0.0, obj.noise_sigma, size=theta.size + 1)
    return value + float(theta @ z[:-1] + z[-1])


def nmse(theta_end: np.ndarray, theta0: np.ndarray, theta_star: np.ndarray) -> float:
    """||theta_end - theta*||^2 / ||theta0 - theta*||^2."""
    theta_star = np.asarray(theta_star, dtype=float)
    theta_end = _as_point(theta_end, theta_star.size)
    theta0 = _as_point(theta0, theta_star.size)
    denominator = float(np.sum((theta0 - theta_star) ** 2))
    if denominator == 0.0:
        raise UndefinedMetricError("NMSE is undefined when theta0 equals theta*.")
    return float(np.sum((theta_end - theta_star) ** 2)) / denominator


def _as_point(theta: np.ndarray, dimension: int) -> np.ndarray:
    point = np.asarray(theta, dtype=float)
    if point.shape != (dimension,):
        raise DimensionMismatchError(dimension, point.size)
    return point
