"""Dyadic horizontal band cutoffs.

psi is 1 on |k| <= 7/2 and 0 on |k| >= 4 with a C-infinity bridge. Bands use
the telescoping profile zeta(k) = psi(k) - psi(2k), so zeta_j(k) = zeta(2^-j k)
is supported in (2^j, 2^(j+2)) and the family sums to one exactly.
"""

from typing import Literal, Union

import numpy as np

from pydantic import model_validator

from common.base import BaseFrozenArbitrary
from common.errors import ParameterError
from domains.spectral.fields import ModalField
from domains.spectral.grid import Grid


PLATEAU_EDGE = 3.5
SUPPORT_EDGE = 4.0

Band = Union[Literal["below", "above"], int]


def _smooth_step(s: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for s <= 0, 1 for s >= 1."""
    s = np.clip(s, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(s > 0.0, np.exp(-1.0 / np.where(s > 0.0, s, 1.0)), 0.0)
        b = np.where(s < 1.0, np.exp(-1.0 / np.where(s < 1.0, 1.0 - s, 1.0)), 0.0)
    return a / (a + b)


def psi_cutoff(k: np.ndarray | float) -> np.ndarray:
    magnitude = np.abs(np.asarray(k, dtype=float))
    bridge = 1.0 - _smooth_step((magnitude - PLATEAU_EDGE) / (SUPPORT_EDGE - PLATEAU_EDGE))
    return np.where(magnitude <= PLATEAU_EDGE, 1.0, np.where(magnitude >= SUPPORT_EDGE, 0.0, bridge))


def zeta(k: np.ndarray | float) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    return psi_cutoff(k) - psi_cutoff(2.0 * k)


class CutoffFamily(BaseFrozenArbitrary):
    R: float
    j1: int
    j2: int
    grid: Grid
    psi_samples: np.ndarray
    zeta_below: np.ndarray
    zeta_bands: np.ndarray
    zeta_above: np.ndarray

    @model_validator(mode="after")
    def _check_bands(self) -> "CutoffFamily":
        if self.zeta_bands.shape != (self.j2 - self.j1 + 1, self.grid.Nx):
            raise ValueError("zeta_bands must hold one row per band j1..j2")
        return self

    def multiplier(self, band: Band) -> np.ndarray:
        match band:
            case "below":
                return self.zeta_below
            case "above":
                return self.zeta_above
            case int(j) if self.j1 <= j <= self.j2:
                return self.zeta_bands[j - self.j1]
            case _:
                raise ParameterError(message=f"band {band!r} outside [{self.j1}, {self.j2}]")

    def partition_sum(self) -> np.ndarray:
        return self.zeta_below + self.zeta_bands.sum(axis=0) + self.zeta_above


def build_cutoffs(R: float, j1: int, j2: int, grid: Grid) -> CutoffFamily:
    """Cutoffs evaluated on the rescaled wavenumbers R|k'|."""
    if j1 >= j2:
        raise ParameterError(message=f"need j1 < j2, got j1={j1}, j2={j2}")
    if R <= 0.0:
        raise ParameterError(message=f"bandwidth must be positive, got R={R}")
    scaled = R * np.abs(grid.k_values)
    bands = np.stack([zeta(scaled / 2.0**j) for j in range(j1, j2 + 1)])
    # the mean mode belongs to P_<; for k' != 0 this equals the sum of zeta_j over j < j1
    below = psi_cutoff(scaled * 2.0 ** (1 - j1))
    above = 1.0 - psi_cutoff(scaled / 2.0**j2)
    return CutoffFamily(
        R=float(R),
        j1=int(j1),
        j2=int(j2),
        grid=grid,
        psi_samples=psi_cutoff(scaled),
        zeta_below=below,
        zeta_bands=bands,
        zeta_above=above,
    )


def band_project(f: ModalField, band: Band, cutoffs: CutoffFamily) -> ModalField:
    if cutoffs.grid != f.grid:
        raise ParameterError(message="cutoffs were built on a different grid")
    return f.with_coefficients(f.coefficients * cutoffs.multiplier(band)[:, np.newaxis])


def band_mask(grid: Grid, R: float, low: float = 1.0, high: float = 4.0) -> np.ndarray:
    """Boolean mask of storage indices with low <= R|k'| <= high."""
    scaled = R * np.abs(grid.k_values)
    mask = (scaled >= low * (1 - 1e-12)) & (scaled <= high * (1 + 1e-12))
    mask[grid.nyquist_index] = False
    return mask


def is_band_limited(f: ModalField, R: float, low: float = 1.0, high: float = 4.0, tolerance: float = 1e-12) -> bool:
    outside = ~band_mask(f.grid, R, low, high)
    leak = np.max(np.abs(f.coefficients[..., outside, :]), initial=0.0)
    return bool(leak <= tolerance * max(1.0, f.max_abs()))
