from typing import Any, Dict

import numpy as np

from scipy.optimize import minimize_scalar

from common.base import BaseFrozen
from common.errors import InputError
from domains.diagnostics.quadrature import WeightKind, singular_weights, weighted_sum


class NormReport(BaseFrozen):
    sup_part: float
    weighted_part: float
    k_value: float
    lambda_star: float
    weight_kind: WeightKind

    def to_json(self) -> Dict[str, Any]:
        return {
            "k_value": self.k_value,
            "lambda_star": self.lambda_star,
            "sup_part": self.sup_part,
            "weighted_part": self.weighted_part,
            "weight_kind": self.weight_kind,
        }


def _excess(profile: np.ndarray, weights: np.ndarray, threshold: float, tolerance: float) -> float:
    return weighted_sum(np.maximum(profile - threshold, 0.0), weights, tolerance)


def weighted_interpolation_norm(
    profile: np.ndarray, z: np.ndarray, weight_kind: WeightKind, tolerance: float = 1e-12
) -> NormReport:
    """Minimises K(lambda) = lambda + int (g - lambda)_+ w dz over lambda >= 0.

    The split f0 = min(g, lambda)/g f, f1 = f - f0 is a z-dependent scalar
    multiple of f and keeps horizontal band limits. K is convex and
    piecewise linear in lambda with kinks at the profile values, so the
    minimum sits at one of them; a bounded scalar search around the best
    kink only guards against round-off in the weights.
    """
    g = np.asarray(profile, dtype=float)
    if g.shape != np.shape(z):
        raise InputError(message=f"profile shape {g.shape} does not match nodes {np.shape(z)}")
    if not np.all(np.isfinite(g)):
        raise InputError(message="profile contains non-finite entries")
    if np.any(g < 0.0):
        raise InputError(message="profile must be nonnegative")

    weights = singular_weights(z, weight_kind)
    pinned = ~np.isfinite(weights)
    floor = float(np.max(g[pinned], initial=0.0))

    def objective(threshold: float) -> float:
        return threshold + _excess(g, weights, threshold, tolerance)

    candidates = np.unique(np.concatenate([[floor], g[g >= floor]]))
    values = np.array([objective(float(c)) for c in candidates])
    best = int(np.argmin(values))
    lambda_star, k_value = float(candidates[best]), float(values[best])

    lower = float(candidates[best - 1]) if best > 0 else floor
    upper = float(candidates[best + 1]) if best + 1 < len(candidates) else lambda_star
    if upper > lower:
        refined = minimize_scalar(objective, bounds=(lower, upper), method="bounded")
        if refined.success and float(refined.fun) < k_value:
            lambda_star, k_value = float(refined.x), float(refined.fun)

    return NormReport(
        sup_part=lambda_star,
        weighted_part=_excess(g, weights, lambda_star, tolerance),
        k_value=k_value,
        lambda_star=lambda_star,
        weight_kind=weight_kind,
    )


def sup_norm(profile: np.ndarray) -> float:
    return float(np.max(np.asarray(profile, dtype=float), initial=0.0))


def weighted_norm(profile: np.ndarray, z: np.ndarray, weight_kind: WeightKind, tolerance: float = 1e-12) -> float:
    return weighted_sum(np.asarray(profile, dtype=float), singular_weights(z, weight_kind), tolerance)
