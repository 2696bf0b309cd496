"""Data types for the unsteady Stokes problems.

Time is discretised on a uniform grid t_n = n dt, n = 0..Nt. Velocities and
divergence data live on the full levels t_n; forcing and pressure live on
the half levels t_{n+1/2}. Vector fields carry their components on the
axis just before (Nx, Nz): index 0 is the horizontal component u', index 1
the vertical component u^z.

Stokes operators with a 1/Pr prefactor on d_t reduce to these by measuring
time in units of Pr, t -> t/Pr.
"""

from typing import Literal, Optional

import numpy as np

from pydantic import model_validator

from common.base import BaseFrozen, BaseFrozenArbitrary
from common.errors import ConfigurationError, ParameterError
from domains.spectral.cutoffs import is_band_limited
from domains.spectral.fields import ModalField
from domains.spectral.grid import Grid


Domain = Literal["strip", "half"]

HORIZONTAL, VERTICAL = 0, 1


class TimeGrid(BaseFrozen):
    Nt: int
    dt: float

    @model_validator(mode="after")
    def _check(self) -> "TimeGrid":
        if self.Nt < 1 or not self.dt > 0.0:
            raise ConfigurationError(message=f"time grid needs Nt >= 1 and dt > 0, got Nt={self.Nt}, dt={self.dt}")
        return self

    @staticmethod
    def over(horizon: float, Nt: int) -> "TimeGrid":
        return TimeGrid(Nt=int(Nt), dt=float(horizon) / int(Nt))

    @property
    def horizon(self) -> float:
        return self.Nt * self.dt

    @property
    def full_levels(self) -> np.ndarray:
        return np.arange(self.Nt + 1) * self.dt

    @property
    def half_levels(self) -> np.ndarray:
        return (np.arange(self.Nt) + 0.5) * self.dt


def default_horizon(R: float, multiple: float = 4.0) -> float:
    """`multiple` diffusion times of the band scale, t0 = multiple * R^2."""
    return multiple * R**2


def default_height(R: float) -> float:
    """Truncation height 8/min|k'| for the band 1 <= R|k'| <= 4."""
    return 8.0 * R


def _check_forcing(f: ModalField, time: TimeGrid, R: float, band: tuple[float, float] = (1.0, 4.0)) -> None:
    if f.leading_shape != (time.Nt, 2):
        raise ConfigurationError(message=f"forcing must have leading shape ({time.Nt}, 2), got {f.leading_shape}")
    if not is_band_limited(f, R, *band):
        raise ParameterError(message=f"forcing is not band-limited to {band[0]:g} <= R|k'| <= {band[1]:g} for R={R}")


class HalfSpaceProblem(BaseFrozenArbitrary):
    """Forcing f (half levels) and divergence data rho (full levels) on [0, z_max]."""

    f: ModalField
    rho: ModalField
    R: float
    time: TimeGrid

    @model_validator(mode="after")
    def _check(self) -> "HalfSpaceProblem":
        if not self.R > 0.0:
            raise ParameterError(message=f"R must be positive, got {self.R}")
        if self.rho.grid != self.f.grid:
            raise ConfigurationError(message="f and rho live on different grids")
        _check_forcing(self.f, self.time, self.R)
        if self.rho.leading_shape != (self.time.Nt + 1,):
            raise ConfigurationError(message=f"rho must have leading shape ({self.time.Nt + 1},)")
        if not is_band_limited(self.rho, self.R):
            raise ParameterError(message=f"rho is not band-limited to 1 <= R|k'| <= 4 for R={self.R}")
        scale = max(1.0, self.rho.max_abs())
        if np.max(np.abs(self.rho.coefficients[0]), initial=0.0) > 1e-12 * scale:
            raise ParameterError(message="rho must vanish at t = 0")
        if np.max(np.abs(self.rho.coefficients[..., 0]), initial=0.0) > 1e-12 * scale:
            raise ParameterError(message="rho must vanish at z = 0")
        return self

    @property
    def grid(self) -> Grid:
        return self.f.grid

    @property
    def z_max(self) -> float:
        return self.grid.height

    @staticmethod
    def without_divergence(f: ModalField, R: float, time: TimeGrid) -> "HalfSpaceProblem":
        return HalfSpaceProblem(f=f, rho=ModalField.zeros(f.grid, (time.Nt + 1,)), R=R, time=time)


class StripProblem(BaseFrozenArbitrary):
    """Forcing on 0 < z < 1; `band` widens the admissible support for negative controls."""

    f: ModalField
    R: float
    time: TimeGrid
    R0: float = 0.125
    band: tuple[float, float] = (1.0, 4.0)

    @model_validator(mode="after")
    def _check(self) -> "StripProblem":
        if not 0.0 < self.R < self.R0:
            raise ParameterError(message=f"strip problems need 0 < R < R0={self.R0}, got R={self.R}")
        if abs(self.f.grid.height - 1.0) > 1e-14:
            raise ConfigurationError(message=f"strip grid must have height 1, got {self.f.grid.height}")
        _check_forcing(self.f, self.time, self.R, self.band)
        return self

    @property
    def grid(self) -> Grid:
        return self.f.grid


class StokesSolution(BaseFrozenArbitrary):
    """Velocity on full levels, pressure and decomposition intermediates on half/full levels."""

    u: ModalField
    p: ModalField
    time: TimeGrid
    phi: Optional[ModalField] = None
    v_z: Optional[ModalField] = None
    v_h: Optional[ModalField] = None
    residuals: dict[str, float] = {}

    @property
    def grid(self) -> Grid:
        return self.u.grid
