"""The three Nusselt numbers: plane flux, volume average and thermal dissipation."""

from typing import Any, Dict

import numpy as np

from scipy.interpolate import BarycentricInterpolator

from common.base import BaseFrozenArbitrary
from common.errors import ParameterError
from domains.diagnostics.averages import TimeAverages
from domains.spectral.transforms import integrate_vertical


class NusseltReport(BaseFrozenArbitrary):
    nu_plane_profile: np.ndarray
    nu_volume: float
    nu_dissipation: float
    spread: float

    @property
    def nu_plane_mean(self) -> float:
        return float(np.mean(self.nu_plane_profile))

    def to_json(self) -> Dict[str, Any]:
        return {
            "nu_plane_mean": self.nu_plane_mean,
            "nu_volume": self.nu_volume,
            "nu_dissipation": self.nu_dissipation,
            "spread": self.spread,
        }


def plane_profile(avg: TimeAverages) -> np.ndarray:
    """<T u^z - d_z T>' at every node."""
    return avg.profile("flux") - avg.profile("dz_T")


def nusselt_plane(avg: TimeAverages, z: float) -> float:
    nodes = avg.grid.z_nodes
    if not nodes[0] <= z <= nodes[-1]:
        raise ParameterError(message=f"height {z} outside [{nodes[0]}, {nodes[-1]}]")
    interpolant = BarycentricInterpolator(nodes, plane_profile(avg))
    return float(interpolant(z))


def nusselt_volume(avg: TimeAverages) -> float:
    return integrate_vertical(plane_profile(avg), avg.grid) / avg.grid.height


def nusselt_dissipation(avg: TimeAverages) -> float:
    return integrate_vertical(avg.profile("grad_T_sq"), avg.grid) / avg.grid.height


def nusselt_report(avg: TimeAverages) -> NusseltReport:
    profile = plane_profile(avg)
    volume = nusselt_volume(avg)
    dissipation = nusselt_dissipation(avg)
    values = np.array([float(np.mean(profile)), volume, dissipation])
    reference = max(abs(volume), 1e-300)
    spread = float((np.max(values) - np.min(values)) / reference)
    spread = max(spread, float(np.max(np.abs(profile - volume)) / reference))
    return NusseltReport(nu_plane_profile=profile, nu_volume=volume, nu_dissipation=dissipation, spread=spread)
