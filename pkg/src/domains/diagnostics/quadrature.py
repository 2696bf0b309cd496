"""Product integration against the singular weights 1/z, 1/(1-z) and 1/(z(1-z)).

The integrand is taken piecewise linear between nodes and each hat function
is integrated against the weight in closed form. A hat centred on a pole
has infinite weight; it contributes nothing when the integrand vanishes
there and makes the integral infinite otherwise.
"""

import math

from typing import Literal

import numpy as np

from common.errors import InputError


WeightKind = Literal["strip", "upper", "lower"]

WEIGHT_KINDS: tuple[WeightKind, ...] = ("strip", "upper", "lower")


def _pole_moments(a: float, b: float) -> tuple[float, float]:
    """Integrals over [a, b] of the rising and falling hat pieces against 1/s, 0 <= a < b."""
    if a == 0.0:
        return 1.0, math.inf
    ratio = math.log1p((b - a) / a)
    width = b - a
    return 1.0 - a / width * ratio, b / width * ratio - 1.0


def _weights_for_pole(z: np.ndarray, pole: float) -> np.ndarray:
    weights = np.zeros(len(z))
    for i in range(len(z) - 1):
        left, right = float(z[i]), float(z[i + 1])
        if pole <= left:
            rise, fall = _pole_moments(left - pole, right - pole)
            weights[i + 1] += rise
            weights[i] += fall
        elif pole >= right:
            rise, fall = _pole_moments(pole - right, pole - left)
            weights[i] += rise
            weights[i + 1] += fall
        else:
            raise InputError(message=f"pole {pole} lies strictly inside a quadrature interval")
    return weights


def singular_weights(z: np.ndarray, kind: WeightKind) -> np.ndarray:
    nodes = np.asarray(z, dtype=float)
    if nodes.ndim != 1 or len(nodes) < 2 or np.any(np.diff(nodes) <= 0.0):
        raise InputError(message="quadrature nodes must be a strictly increasing 1-D array")
    match kind:
        case "upper":
            return _weights_for_pole(nodes, 0.0)
        case "lower":
            return _weights_for_pole(nodes, 1.0)
        case "strip":
            return _weights_for_pole(nodes, 0.0) + _weights_for_pole(nodes, 1.0)


def weighted_sum(values: np.ndarray, weights: np.ndarray, tolerance: float = 1e-12) -> float:
    """Sum of weights * values where infinite weights meet (numerically) zero values as zero."""
    finite = np.isfinite(weights)
    total = float(np.dot(weights[finite], values[finite]))
    singular = np.abs(values[~finite])
    if np.any(singular > tolerance):
        return math.inf
    return total


def singular_integral(values: np.ndarray, z: np.ndarray, kind: WeightKind, tolerance: float = 1e-12) -> float:
    return weighted_sum(np.asarray(values, dtype=float), singular_weights(z, kind), tolerance)
