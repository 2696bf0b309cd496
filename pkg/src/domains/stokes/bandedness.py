"""Band-limit inequalities for horizontally band-limited fields.

    high     (R|k'| >= 4):      <|r|>'        <= R <|grad' r|>'
    low      (R|k'| <= 1):      <|grad' r|>'  <= (1/R) <|r|>'
    riesz    (1 <= R|k'| <= 4): ||grad'(-Delta')^{-1/2} r||  ~ ||r||
    half     (1 <= R|k'| <= 4): ||(-Delta')^{1/2} r||        ~ ||grad' r||
    gradient (1 <= R|k'| <= 4): ||grad'(-Delta')^{-1} div' r|| <= C ||r||
"""

import math

from typing import Any, Dict, Literal, Optional, Sequence

import numpy as np

from common.base import BaseFrozen
from common.errors import ParameterError
from domains.diagnostics.norms import weighted_interpolation_norm
from domains.diagnostics.quadrature import WeightKind
from domains.spectral.cutoffs import is_band_limited
from domains.spectral.fields import ModalField
from domains.spectral.transforms import fractional_laplacian_half, horizontal_derivative, to_physical


Item = Literal["high", "low", "riesz", "half", "gradient"]

ITEMS: tuple[Item, ...] = ("high", "low", "riesz", "half", "gradient")

_BANDS: dict[Item, tuple[float, float]] = {
    "high": (4.0, math.inf),
    "low": (0.0, 1.0),
    "riesz": (1.0, 4.0),
    "half": (1.0, 4.0),
    "gradient": (1.0, 4.0),
}


class BandednessReport(BaseFrozen):
    ratios: dict[str, float]
    worst: float
    R: float

    def to_json(self) -> Dict[str, Any]:
        return {"ratios": dict(self.ratios), "worst": self.worst, "R": self.R}


def _pointwise_ratio(numerator: ModalField, denominator: ModalField, scale: float) -> float:
    """max over (t, z) of <|numerator|>' / (scale <|denominator|>')."""
    top = np.mean(np.abs(to_physical(numerator.coefficients, numerator.grid)), axis=-2)
    bottom = scale * np.mean(np.abs(to_physical(denominator.coefficients, denominator.grid)), axis=-2)
    significant = bottom > 1e-12 * max(float(np.max(bottom, initial=0.0)), 1e-300)
    if not np.any(significant):
        return 0.0
    return float(np.max(top[significant] / bottom[significant]))


def _norm(field: ModalField, weight: WeightKind) -> float:
    values = np.abs(to_physical(field.coefficients, field.grid))
    profile = np.mean(values, axis=tuple(range(values.ndim - 1)))
    return weighted_interpolation_norm(profile, field.grid.z_nodes, weight).k_value


def _ratio(numerator: float, denominator: float) -> float:
    return numerator / denominator if denominator > 0.0 else 0.0


def bandedness_inequality(r: ModalField, R: float, item: Item, weight: WeightKind = "upper") -> float:
    low, high = _BANDS[item]
    if not is_band_limited(r, R, low, high):
        raise ParameterError(message=f"field is not supported in {low:g} <= R|k'| <= {high:g} required by '{item}'")
    match item:
        case "high":
            return _pointwise_ratio(r, horizontal_derivative(r), R)
        case "low":
            return _pointwise_ratio(horizontal_derivative(r), r, 1.0 / R)
        case "riesz":
            riesz = horizontal_derivative(fractional_laplacian_half(r, -0.5))
            return _ratio(_norm(riesz, weight), _norm(r, weight))
        case "half":
            return _ratio(_norm(fractional_laplacian_half(r, 0.5), weight), _norm(horizontal_derivative(r), weight))
        case "gradient":
            gradient = horizontal_derivative(fractional_laplacian_half(horizontal_derivative(r), -1))
            return _ratio(_norm(gradient, weight), _norm(r, weight))


def _severity(item: Item, value: float) -> float:
    """Inequalities report their ratio; equivalences the larger of ratio and inverse."""
    if item in ("high", "low", "gradient") or value <= 0.0:
        return value
    return max(value, 1.0 / value)


def bandedness_inequalities(
    r: ModalField, R: float, items: Optional[Sequence[Item]] = None, weight: WeightKind = "upper"
) -> BandednessReport:
    """Evaluates the requested items (default: every item whose band r satisfies)."""
    if items is None:
        chosen = [item for item in ITEMS if is_band_limited(r, R, *_BANDS[item])]
        if not chosen:
            raise ParameterError(message=f"field fits none of the band conditions for R={R}")
    else:
        chosen = list(items)
    ratios = {item: bandedness_inequality(r, R, item, weight) for item in chosen}
    worst = max(_severity(item, value) for item, value in ratios.items())
    return BandednessReport(ratios=ratios, worst=float(worst), R=float(R))
