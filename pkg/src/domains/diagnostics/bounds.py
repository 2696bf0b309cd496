"""Balance-law residuals and the two-branch Nusselt bound."""

import math

from typing import Any, Dict, Literal, Optional, Sequence

import numpy as np

from scipy.interpolate import BarycentricInterpolator

from common.base import BaseFrozen
from common.errors import ParameterError
from domains.boussinesq.params import SimParams
from domains.diagnostics.averages import TimeAverages
from domains.diagnostics.nusselt import nusselt_volume
from domains.spectral.grid import clenshaw_curtis_weights, chebyshev_operator
from domains.spectral.transforms import integrate_vertical


Branch = Literal["high_pr", "low_pr"]

MIN_BOUND_RA = 1e4


def energy_balance_residual(avg: TimeAverages, params: SimParams) -> float:
    nu = nusselt_volume(avg)
    production = params.Ra * (nu - 1.0)
    dissipation = integrate_vertical(avg.profile("grad_u_sq"), avg.grid)
    return (dissipation - production) / max(1.0, production)


def _layer_integral(profile: np.ndarray, avg: TimeAverages, delta: float) -> float:
    """Integral over [0, delta] of the interpolated profile on delta-scaled Clenshaw-Curtis nodes."""
    grid = avg.grid
    interpolant = BarycentricInterpolator(grid.z_nodes, profile)
    nodes, _ = chebyshev_operator(grid.Nz, delta)
    weights = clenshaw_curtis_weights(grid.Nz, delta)
    return float(np.dot(weights, interpolant(nodes)))


def boundary_layer_bound(avg: TimeAverages, delta: float, crude: bool = False) -> float:
    """(1/delta) int_0^delta <T u^z> dz + 1/delta; with `crude`, |u^z| replaces T u^z."""
    if not 0.0 < delta < 0.5 * avg.grid.height:
        raise ParameterError(message=f"delta must lie in (0, 1/2), got {delta}")
    profile = avg.profile("abs_uz" if crude else "flux")
    return _layer_integral(profile, avg, delta) / delta + 1.0 / delta


def _inertia_factor(Pr: float, Nu: float) -> float:
    return 1.0 if math.isinf(Pr) else Nu / Pr + 1.0


def delta_choice(Ra: float, Pr: float, Nu: float) -> float:
    if Ra <= 1.0:
        raise ParameterError(message=f"delta_choice needs Ra > 1, got {Ra}")
    return (_inertia_factor(Pr, Nu) * Ra * math.log(Ra)) ** (-1.0 / 3.0)


def opt1_rhs(delta: float, Ra: float, Pr: float, Nu: float, band_count: Optional[float] = None) -> float:
    """Right side of the dyadic-window Nusselt estimate with j2 - j1 = band_count (default ln Ra)."""
    n = math.log(Ra) if band_count is None else band_count
    return n * delta**2 * _inertia_factor(Pr, Nu) * Ra + 2.0 ** (-n / 2.0) * delta * math.sqrt(Ra) * Nu + 1.0 / delta


def delta_bruteforce(Ra: float, Pr: float, Nu: float, samples: int = 4001) -> float:
    deltas = np.geomspace(1e-6, 0.5, samples)
    values = np.array([opt1_rhs(float(d), Ra, Pr, Nu) for d in deltas])
    return float(deltas[int(np.argmin(values))])


def branch_of(Ra: float, Pr: float) -> Branch:
    return "high_pr" if Pr >= (Ra * math.log(Ra)) ** (1.0 / 3.0) else "low_pr"


def bound_shape(Ra: float, Pr: float) -> float:
    match branch_of(Ra, Pr):
        case "high_pr":
            return (Ra * math.log(Ra)) ** (1.0 / 3.0)
        case "low_pr":
            return math.sqrt(Ra * math.log(Ra) / Pr)


class BoundEntry(BaseFrozen):
    Ra: float
    Pr: float
    Nu: float


class BoundReport(BaseFrozen):
    constant: float
    binding: BoundEntry
    binding_index: int
    branches: list[Branch]
    ratios: list[float]

    def to_json(self) -> Dict[str, Any]:
        return {
            "C": self.constant,
            "binding": {"Ra": self.binding.Ra, "Pr": self.binding.Pr, "Nu": self.binding.Nu},
            "binding_index": self.binding_index,
            "branches": list(self.branches),
            "ratios": list(self.ratios),
        }


def bound_check(results: Sequence[tuple[float, float, float]]) -> BoundReport:
    """Smallest C with Nu <= C * shape(Ra, Pr) for every entry."""
    if not results:
        raise ParameterError(message="bound_check needs at least one (Ra, Pr, Nu) entry")
    entries = [BoundEntry(Ra=float(ra), Pr=float(pr), Nu=float(nu)) for ra, pr, nu in results]
    for entry in entries:
        if entry.Ra < MIN_BOUND_RA:
            raise ParameterError(message=f"bound_check needs Ra >= {MIN_BOUND_RA:g}, got {entry.Ra:g}")
        if not entry.Pr > 0.0:
            raise ParameterError(message=f"Pr must be positive, got {entry.Pr}")
    ratios = [entry.Nu / bound_shape(entry.Ra, entry.Pr) for entry in entries]
    binding_index = int(np.argmax(ratios))
    return BoundReport(
        constant=float(ratios[binding_index]),
        binding=entries[binding_index],
        binding_index=binding_index,
        branches=[branch_of(entry.Ra, entry.Pr) for entry in entries],
        ratios=[float(r) for r in ratios],
    )
