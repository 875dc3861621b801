"""Gradient estimates from noisy measurements taken along one perturbation direction."""
from __future__ import annotations

import math
from typing import Optional

import numpy as np

from app.models import EstimatorKind
from app.services.errors import EstimationError, InvalidSensitivityError


def two_sided_estimate(y_plus: float, y_minus: float, d: np.ndarray, delta: float) -> np.ndarray:
    """((y+ - y-) / 2 delta) d from measurements at theta + delta d and theta - delta d."""
    _check_inputs(delta, d, y_plus, y_minus)
    return ((y_plus - y_minus) / (2.0 * delta)) * d


def one_sided_estimate(y_plus: float, d: np.ndarray, delta: float) -> np.ndarray:
    """(y+ / delta) d from a single measurement at theta + delta d."""
    _check_inputs(delta, d, y_plus)
    return (y_plus / delta) * d


def estimate_gradient(
    kind: EstimatorKind,
    y_plus: float,
    y_minus: Optional[float],
    d: np.ndarray,
    delta: float,
) -> np.ndarray:
    if kind is EstimatorKind.TWO_SIDED:
        if y_minus is None:
            raise EstimationError("Two-sided estimate needs both y+ and y-.")
        return two_sided_estimate(y_plus, y_minus, d, delta)
    return one_sided_estimate(y_plus, d, delta)


def _check_inputs(delta: float, d: np.ndarray, *measurements: float) -> None:
    if not delta > 0:
        raise InvalidSensitivityError(delta)
    for value in measurements:
        if not math.isfinite(value):
            raise EstimationError(f"Non-finite measurement {value!r}.")
    if not np.all(np.isfinite(d)):
        raise EstimationError("Non-finite perturbation direction.")
