"""
Perturbation direction sequences for random-direction Kiefer-Wolfowitz.

A deterministic cycle d_1..d_P is usable when it satisfies

    sum_n d_n d_n^T = P I     (P1)
    sum_n d_n       = 0       (P2)

which is the same as X X^T = P I for X = [u^T; Y] with Y the p x P matrix of
directions. Two constructions are provided: the circulant one with the
minimal cycle length P = p+1, and rows of a Sylvester Hadamard matrix with P
the smallest power of two >= p+1. Random symmetric Bernoulli directions
satisfy the same conditions in expectation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

import numpy as np
from scipy.linalg import hadamard

from app.models import PerturbationKind, VerificationReport
from app.services.errors import ConfigurationError, InvalidDimensionError


@runtime_checkable
class DirectionSource(Protocol):
    """
    Anything the optimiser can draw perturbation directions from.
    """
    @property
    def dimension(self) -> int: ...

    def next_direction(self) -> np.ndarray: ...

    def reset(self) -> None: ...


@dataclass(frozen=True, slots=True)
class CirculantSpec:
    dimension: int

    def __post_init__(self) -> None:
        _check_dimension(self.dimension)


@dataclass(eq=False)
class PerturbationCycle:
    """
    A p x P matrix of directions cycled column by column.

    The matrix is read-only once constructed; only the cursor moves, so a
    cycle belongs to a single optimiser run.
    """

    columns: np.ndarray
    source: PerturbationKind | None = None
    cursor: int = 0

    def __post_init__(self) -> None:
        columns = np.array(self.columns, dtype=float)
        if columns.ndim != 2:
            raise ConfigurationError("Perturbation columns must form a p x P matrix.")
        p, cycle_length = columns.shape
        _check_dimension(p)
        if cycle_length < p + 1:
            raise ConfigurationError(
                f"Cycle length {cycle_length} is below the minimum p+1 = {p + 1}."
            )
        if not np.all(np.isfinite(columns)):
            raise ConfigurationError("Perturbation columns must be finite.")
        columns.setflags(write=False)
        self.columns = columns
        if self.cursor < 0:
            raise ConfigurationError("Cursor must be non-negative.")

    @property
    def dimension(self) -> int:
        return self.columns.shape[0]

    @property
    def cycle_length(self) -> int:
        return self.columns.shape[1]

    def next_direction(self) -> np.ndarray:
        direction = self.columns[:, self.cursor % self.cycle_length].copy()
        self.cursor += 1
        return direction

    def reset(self) -> None:
        self.cursor = 0


@dataclass(eq=False)
class BernoulliGenerator:
    """
    Symmetric Bernoulli directions: every component is +1 or -1 with probability 1/2.

    The stream is the first child of the seed's SeedSequence, so it stays
    independent of a noise generator seeded with the same integer.
    """

    dimension: int
    seed: int
    _rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self) -> None:
        _check_dimension(self.dimension)
        self.reset()

    def next_direction(self) -> np.ndarray:
        return 2.0 * self._rng.integers(0, 2, size=self.dimension) - 1.0

    def reset(self) -> None:
        self._rng = np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(0,)))


def circulant_inverse_sqrt(p: int) -> np.ndarray:
    """
    (I + u u^T)^{-1/2} in closed form: I - u u^T/p + u u^T/(p sqrt(1+p)).
    """
    _check_dimension(p)
    ones = np.ones((p, p))
    return np.eye(p) - ones / p + ones / (p * math.sqrt(1.0 + p))


def build_circulant_cycle(spec: CirculantSpec) -> PerturbationCycle:
    """
    Columns of sqrt(p+1) [C^{-1/2}, -C^{-1/2} u], cycle length p+1.
    """
    p = spec.dimension
    scaled_root = math.sqrt(p + 1.0) * circulant_inverse_sqrt(p)
    # C^{-1/2} u = u / sqrt(p+1), so the closing column is exactly -u
    closing = -np.ones((p, 1))
    return PerturbationCycle(
        columns=np.hstack([scaled_root, closing]),
        source=PerturbationKind.CIRCULANT,
    )


def hadamard_cycle_length(p: int) -> int:
    """Smallest power of two that is >= p+1."""
    _check_dimension(p)
    return 1 << int(p).bit_length()


def build_hadamard_cycle(p: int) -> PerturbationCycle:
    """
    Rows 2..p+1 of the Sylvester Hadamard matrix of order 2^ceil(log2(p+1)).
    The all-ones first row plays the role of u^T.
    """
    order = hadamard_cycle_length(p)
    matrix = hadamard(order)
    return PerturbationCycle(
        columns=matrix[1 : p + 1, :].astype(float),
        source=PerturbationKind.HADAMARD,
    )


def build_cycle(kind: PerturbationKind, p: int) -> PerturbationCycle:
    if kind is PerturbationKind.CIRCULANT:
        return build_circulant_cycle(CirculantSpec(p))
    if kind is PerturbationKind.HADAMARD:
        return build_hadamard_cycle(p)
    raise ConfigurationError(f"{kind.value} perturbations are random and do not form a cycle.")


def build_direction_source(kind: PerturbationKind, p: int, seed: int = 0) -> DirectionSource:
    if kind is PerturbationKind.BERNOULLI:
        return BernoulliGenerator(dimension=p, seed=seed)
    return build_cycle(kind, p)


def verify_cycle(cycle: PerturbationCycle) -> VerificationReport:
    """
    Residuals of the two cycle properties plus the direction-norm bounds.
    """
    columns = cycle.columns
    p, cycle_length = columns.shape

    second_moment = columns @ columns.T
    p1_residual = float(np.max(np.abs(second_moment - cycle_length * np.eye(p))))
    p2_residual = float(np.max(np.abs(columns.sum(axis=1))))

    stacked = np.vstack([np.ones((1, cycle_length)), columns])
    orthogonality_residual = float(
        np.max(np.abs(stacked @ stacked.T - cycle_length * np.eye(p + 1)))
    )

    norms = np.linalg.norm(columns, axis=0)
    # d d^T - I has eigenvalues ||d||^2 - 1 and (for p > 1) -1
    outer_norms = np.abs(norms**2 - 1.0)
    if p > 1:
        outer_norms = np.maximum(outer_norms, 1.0)

    return VerificationReport(
        source=cycle.source,
        dimension=p,
        cycle_length=cycle_length,
        p1_residual=p1_residual,
        p2_residual=p2_residual,
        orthogonality_residual=orthogonality_residual,
        max_col_norm=float(norms.max()),
        max_outer_norm=float(outer_norms.max()),
    )


def _check_dimension(p: int) -> None:
    if isinstance(p, bool) or not isinstance(p, (int, np.integer)) or p < 1:
        raise InvalidDimensionError(p)
