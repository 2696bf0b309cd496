import numpy as np

from common.errors import ParameterError
from domains.spectral.cutoffs import band_mask
from domains.spectral.fields import ModalField
from domains.spectral.grid import Grid
from domains.stokes.problems import TimeGrid


BUMPS = 3


def time_profile(t: np.ndarray, horizon: float) -> np.ndarray:
    """Smooth ramp vanishing at t = 0."""
    return np.sin(0.5 * np.pi * np.asarray(t) / horizon) ** 2


def _bumps(rng: np.random.Generator, z: np.ndarray, height: float, localized: bool) -> np.ndarray:
    low, high, width = (0.15, 0.45, 0.08) if localized else (0.2, 0.8, 0.12)
    profile = np.zeros(len(z), dtype=complex)
    for _ in range(BUMPS):
        center = rng.uniform(low, high) * height
        amplitude = rng.normal() + 1j * rng.normal()
        profile += amplitude * np.exp(-(((z - center) / (width * height)) ** 2))
    return profile


def _mirror_conjugate(coefficients: np.ndarray, grid: Grid, indices: np.ndarray) -> None:
    for index in indices:
        n = int(grid.mode_numbers[index])
        if n > 0:
            coefficients[..., grid.mode_index(-n), :] = np.conj(coefficients[..., index, :])


def random_band_forcing(
    grid: Grid,
    R: float,
    time: TimeGrid,
    seed: int,
    band: tuple[float, float] = (1.0, 4.0),
    localized: bool = False,
    amplitude: float = 1.0,
) -> ModalField:
    """Random real forcing (Nt, 2, Nx, Nz) on half levels, supported where band[0] <= R|k'| <= band[1].

    Vertical profiles are sums of Gaussian bumps; `localized` keeps them in
    the lower half of the column so they vanish at the truncation height.
    """
    mask = band_mask(grid, R, *band)
    positive = np.flatnonzero(mask & (grid.mode_numbers > 0))
    if positive.size == 0:
        raise ParameterError(message=f"no resolved modes with {band[0]} <= R|k'| <= {band[1]} for R={R}")
    rng = np.random.default_rng(seed)
    z = grid.z_nodes
    shape = np.zeros((2, grid.Nx, grid.Nz), dtype=complex)
    for index in positive:
        for component in range(2):
            shape[component, index] = _bumps(rng, z, grid.height, localized)
    _mirror_conjugate(shape, grid, positive)
    shape *= amplitude / max(float(np.max(np.abs(shape))), 1e-300)
    ramp = time_profile(time.half_levels, time.horizon)
    return ModalField(coefficients=ramp[:, np.newaxis, np.newaxis, np.newaxis] * shape, grid=grid)


def random_band_divergence(grid: Grid, R: float, time: TimeGrid, seed: int, amplitude: float = 1.0) -> ModalField:
    """Band-limited divergence data on full levels vanishing at t = 0 and at z = 0."""
    mask = band_mask(grid, R)
    positive = np.flatnonzero(mask & (grid.mode_numbers > 0))
    rng = np.random.default_rng(seed)
    z = grid.z_nodes
    wall = 1.0 - np.exp(-((z / (0.08 * grid.height)) ** 2))
    shape = np.zeros((grid.Nx, grid.Nz), dtype=complex)
    for index in positive:
        shape[index] = _bumps(rng, z, grid.height, True) * wall
    _mirror_conjugate(shape, grid, positive)
    shape *= amplitude / max(float(np.max(np.abs(shape))), 1e-300)
    ramp = time_profile(time.full_levels, time.horizon)
    return ModalField(coefficients=ramp[:, np.newaxis, np.newaxis] * shape, grid=grid)
