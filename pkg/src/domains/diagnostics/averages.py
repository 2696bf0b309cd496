"""Horizontal and long-time averages of the Nusselt integrands.

Horizontal means of products come straight from the modal coefficients by
Parseval; the long-time average is the running mean of samples taken after
the transient.
"""

from typing import Optional

import numpy as np

from common.base import BaseFrozenArbitrary
from common.errors import StateError
from domains.boussinesq.state import State
from domains.spectral.grid import Grid
from domains.spectral.transforms import horizontal_average_product, horizontal_mean_abs


PROFILE_NAMES = ("flux", "grad_T_sq", "grad_u_sq", "dz_T", "abs_uz")


class ProfileSample(BaseFrozenArbitrary):
    """One snapshot's horizontally averaged profiles, each of length Nz."""

    flux: np.ndarray
    grad_T_sq: np.ndarray
    grad_u_sq: np.ndarray
    dz_T: np.ndarray
    abs_uz: np.ndarray
    t: float


def sample_profiles(state: State) -> ProfileSample:
    grid = state.grid
    D = grid.dz_matrix
    ik = 1j * grid.k_values[:, np.newaxis]
    T = state.T.coefficients
    u, w = state.velocity()

    T_z = T @ D.T
    gradients_u = (ik * u, u @ D.T, ik * w, w @ D.T)
    return ProfileSample(
        flux=horizontal_average_product(T, w),
        grad_T_sq=horizontal_average_product(ik * T, ik * T) + horizontal_average_product(T_z, T_z),
        grad_u_sq=sum(horizontal_average_product(g, g) for g in gradients_u),
        dz_T=np.real(T_z[0]),
        abs_uz=horizontal_mean_abs(w, grid),
        t=float(state.t),
    )


class TimeAverages(BaseFrozenArbitrary):
    """Running sums of profile samples over the averaging window [t_first, t_last]."""

    grid: Grid
    sums: np.ndarray
    count: int = 0
    t_first: Optional[float] = None
    t_last: Optional[float] = None

    @staticmethod
    def empty(grid: Grid) -> "TimeAverages":
        return TimeAverages(grid=grid, sums=np.zeros((len(PROFILE_NAMES), grid.Nz)))

    def add(self, sample: ProfileSample) -> "TimeAverages":
        stacked = np.stack([getattr(sample, name) for name in PROFILE_NAMES])
        return TimeAverages(
            grid=self.grid,
            sums=self.sums + stacked,
            count=self.count + 1,
            t_first=sample.t if self.t_first is None else self.t_first,
            t_last=sample.t,
        )

    @property
    def is_empty(self) -> bool:
        return self.count == 0

    def profile(self, name: str) -> np.ndarray:
        if self.is_empty:
            raise StateError(message="no samples accumulated; averages are empty")
        return self.sums[PROFILE_NAMES.index(name)] / self.count

    @property
    def window(self) -> tuple[float, float]:
        if self.t_first is None or self.t_last is None:
            raise StateError(message="no samples accumulated; averaging window undefined")
        return self.t_first, self.t_last


def averages_of(states: list[State]) -> TimeAverages:
    if not states:
        raise StateError(message="cannot average an empty list of states")
    averages = TimeAverages.empty(states[0].grid)
    for state in states:
        averages = averages.add(sample_profiles(state))
    return averages


def running_mean(series: np.ndarray) -> np.ndarray:
    values = np.asarray(series, dtype=float)
    return np.cumsum(values) / np.arange(1, len(values) + 1)


def plateau_reached(series: np.ndarray, drift: float = 0.01) -> bool:
    """True when the running mean moved by less than `drift` (relative) over the last half of the series."""
    values = np.asarray(series, dtype=float)
    if len(values) < 4 or not np.all(np.isfinite(values)):
        return False
    means = running_mean(values)
    final = means[-1]
    if final == 0.0:
        return bool(np.max(np.abs(means[len(means) // 2 :])) <= drift)
    return bool(np.max(np.abs(means[len(means) // 2 :] - final)) <= drift * abs(final))
