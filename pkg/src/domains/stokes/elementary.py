"""Per-mode solvers for the four elementary problems of the Stokes decomposition.

    backward fractional:  (d_z - |k'|) u = f,  u(z_max) = 0
    forward fractional:   (d_z + |k'|) u = f,  u(0) = g
    heat:                 (d_t - d_z^2 + |k'|^2) u = f,  u = 0 at z = 0, z_max and t = 0

The fractional problems are integrated towards their decaying direction; the
heat problem is Crank-Nicolson in time with forcing sampled on half levels.
"""

from functools import lru_cache
from typing import Optional

import numpy as np

from scipy.linalg import lu_factor, solve, solve_triangular, toeplitz

from common.errors import SingularModeError, StageError, StepSizeError
from domains.spectral.fields import ModalField
from domains.spectral.grid import Grid
from domains.spectral.linalg import LUFactor, dirichlet_rows, solve_batched
from domains.stokes.problems import TimeGrid


ODE_TOLERANCE = 1e-8
HEAT_TOLERANCE = 1e-6
MAX_DT_KAPPA2 = 4.0


def heat_symbol(grid: Grid, kappa: float) -> np.ndarray:
    """M = |k'|^2 - d_z^2 on the collocation grid."""
    D = grid.dz_matrix
    return kappa**2 * np.identity(grid.Nz) - D @ D


@lru_cache(maxsize=512)
def backward_factor(grid: Grid, kappa: float) -> LUFactor:
    matrix = grid.dz_matrix - kappa * np.identity(grid.Nz)
    matrix[-1, :] = 0.0
    matrix[-1, -1] = 1.0
    return lu_factor(matrix)


@lru_cache(maxsize=512)
def forward_factor(grid: Grid, kappa: float) -> LUFactor:
    matrix = grid.dz_matrix + kappa * np.identity(grid.Nz)
    matrix[0, :] = 0.0
    matrix[0, 0] = 1.0
    return lu_factor(matrix)


@lru_cache(maxsize=512)
def heat_factor(grid: Grid, kappa: float, dt: float) -> tuple[LUFactor, np.ndarray]:
    M = heat_symbol(grid, kappa)
    identity = np.identity(grid.Nz)
    return lu_factor(dirichlet_rows(identity / dt + 0.5 * M)), identity / dt - 0.5 * M


def _magnitude(values: np.ndarray | float | None) -> float:
    return 0.0 if values is None else float(np.max(np.abs(values), initial=0.0))


def _relative(residual: np.ndarray, *references: np.ndarray | float | None) -> float:
    scale = max(max(_magnitude(r) for r in references), 1e-300)
    return _magnitude(residual) / scale


def _check(stage: str, residual: float, tolerance: float) -> None:
    if residual > tolerance:
        raise StageError(message="residual above tolerance", stage=stage, residual=residual, tolerance=tolerance)


def fractional_backward_mode(rhs: np.ndarray, kappa: float, grid: Grid) -> np.ndarray:
    data = np.array(rhs, dtype=complex)
    data[..., -1] = 0.0
    return solve_batched(backward_factor(grid, kappa), data)


def fractional_forward_mode(rhs: np.ndarray, kappa: float, grid: Grid, boundary: Optional[np.ndarray] = None) -> np.ndarray:
    data = np.array(rhs, dtype=complex)
    data[..., 0] = 0.0 if boundary is None else boundary
    return solve_batched(forward_factor(grid, kappa), data)


def heat_mode(forcing: np.ndarray, kappa: float, grid: Grid, time: TimeGrid) -> np.ndarray:
    """Crank-Nicolson march; forcing has shape (Nt, ..., Nz), the result (Nt + 1, ..., Nz)."""
    factor, explicit = heat_factor(grid, kappa, time.dt)
    solution = np.zeros((time.Nt + 1,) + forcing.shape[1:], dtype=complex)
    for n in range(time.Nt):
        rhs = solution[n] @ explicit.T + forcing[n]
        rhs[..., 0] = 0.0
        rhs[..., -1] = 0.0
        solution[n + 1] = solve_batched(factor, rhs)
    return solution


def heat_operator(u: np.ndarray, kappa: float, grid: Grid, time: TimeGrid) -> np.ndarray:
    """Crank-Nicolson (d_t - d_z^2 + |k'|^2) of a full-level series, evaluated on half levels."""
    M = heat_symbol(grid, kappa)
    return (u[1:] - u[:-1]) / time.dt + 0.5 * (u[1:] + u[:-1]) @ M.T


def active_modes(field: ModalField, tolerance: float = 0.0) -> list[int]:
    """Storage indices carrying nonzero data; a nonzero mean mode is rejected."""
    magnitude = np.max(np.abs(field.coefficients), axis=tuple(range(field.coefficients.ndim - 2)) + (-1,))
    threshold = tolerance * max(1.0, field.max_abs())
    active = [int(i) for i in np.flatnonzero(magnitude > threshold)]
    if 0 in active:
        raise SingularModeError(message="data on the mean mode k' = 0, which the band excludes")
    return active


def _kappa(grid: Grid, index: int) -> float:
    return float(abs(grid.k_values[index]))


def solve_fractional_backward(f: ModalField) -> ModalField:
    grid = f.grid
    D = grid.dz_matrix
    u = np.zeros_like(f.coefficients, dtype=complex)
    for index in active_modes(f):
        kappa = _kappa(grid, index)
        rhs = f.coefficients[..., index, :]
        u[..., index, :] = fractional_backward_mode(rhs, kappa, grid)
        residual = u[..., index, :] @ D.T - kappa * u[..., index, :] - rhs
        _check("fractional_backward", _relative(residual[..., :-1], rhs), ODE_TOLERANCE)
    return f.with_coefficients(u)


def solve_fractional_forward(v: ModalField, g: Optional[np.ndarray] = None) -> ModalField:
    """g holds the boundary values at z = 0 with shape leading + (Nx,)."""
    grid = v.grid
    D = grid.dz_matrix
    u = np.zeros_like(v.coefficients, dtype=complex)
    modes = set(active_modes(v))
    if g is not None:
        modes |= {int(i) for i in np.flatnonzero(np.max(np.abs(g.reshape(-1, grid.Nx)), axis=0) > 0.0)}
        if 0 in modes:
            raise SingularModeError(message="boundary data on the mean mode k' = 0")
    for index in sorted(modes):
        kappa = _kappa(grid, index)
        rhs = v.coefficients[..., index, :]
        boundary = None if g is None else g[..., index]
        u[..., index, :] = fractional_forward_mode(rhs, kappa, grid, boundary)
        residual = u[..., index, :] @ D.T + kappa * u[..., index, :] - rhs
        _check("fractional_forward", _relative(residual[..., 1:], rhs, boundary), ODE_TOLERANCE)
    return v.with_coefficients(u)


def check_heat_accuracy(grid: Grid, time: TimeGrid, modes: list[int], limit: float = MAX_DT_KAPPA2) -> None:
    if not modes:
        return
    kappa_max = max(_kappa(grid, index) for index in modes)
    if time.dt * kappa_max**2 > limit:
        raise StepSizeError(
            message=f"dt * |k'|^2 = {time.dt * kappa_max**2:.3g} exceeds {limit:g}; refine the time grid"
        )


def solve_heat_dirichlet(f: ModalField, time: TimeGrid) -> ModalField:
    """Zero initial data and Dirichlet walls; f has leading shape (Nt, ...)."""
    grid = f.grid
    if f.leading_shape[:1] != (time.Nt,):
        raise StepSizeError(message=f"forcing has {f.leading_shape[:1]} time samples, expected {time.Nt}")
    modes = active_modes(f)
    check_heat_accuracy(grid, time, modes)
    u = np.zeros((time.Nt + 1,) + f.coefficients.shape[1:], dtype=complex)
    for index in modes:
        kappa = _kappa(grid, index)
        forcing = f.coefficients[..., index, :]
        u[..., index, :] = heat_mode(forcing, kappa, grid, time)
        residual = heat_operator(u[..., index, :], kappa, grid, time) - forcing
        _check("heat", _relative(residual[..., 1:-1], forcing), HEAT_TOLERANCE)
    return ModalField(coefficients=u, grid=grid)


def horizontal_projector(k_vectors: np.ndarray) -> np.ndarray:
    """I - k k^T / |k|^2 per wavevector; k has shape (modes, m). Zero vectors map to the identity."""
    k = np.asarray(k_vectors, dtype=float)
    m = k.shape[-1]
    norms = np.sum(k**2, axis=-1)
    safe = np.where(norms > 0.0, norms, 1.0)
    outer = k[..., :, np.newaxis] * k[..., np.newaxis, :] / safe[..., np.newaxis, np.newaxis]
    outer[norms == 0.0] = 0.0
    return np.identity(m) - outer


def project_horizontal(f_h: ModalField) -> ModalField:
    """Removes the horizontal gradient part of f'; with a single horizontal direction nothing remains."""
    active_modes(f_h)
    k = f_h.grid.k_values[:, np.newaxis]
    projector = horizontal_projector(k)[:, 0, 0]
    return f_h.with_coefficients(f_h.coefficients * projector[:, np.newaxis])


def solve_heat_horizontal(f_h: ModalField, time: TimeGrid) -> ModalField:
    return solve_heat_dirichlet(project_horizontal(f_h), time)


def wavenumber_column(grid: Grid) -> np.ndarray:
    return grid.k_values[:, np.newaxis]


def inverse_kappa_squared(grid: Grid) -> np.ndarray:
    """1/|k'|^2 per mode with the mean and Nyquist modes set to zero."""
    k2 = grid.k_values**2
    inverse = np.zeros_like(k2)
    inverse[1:] = 1.0 / k2[1:]
    inverse[grid.nyquist_index] = 0.0
    return inverse[:, np.newaxis]


def apply_heat(field: ModalField, time: TimeGrid) -> ModalField:
    """Crank-Nicolson heat operator of a full-level series, on half levels, for every mode at once."""
    grid = field.grid
    c = field.coefficients
    if c.shape[0] != time.Nt + 1:
        raise StepSizeError(message=f"series has {c.shape[0]} levels, expected {time.Nt + 1}")
    D = grid.dz_matrix
    average = 0.5 * (c[1:] + c[:-1])
    values = (c[1:] - c[:-1]) / time.dt + wavenumber_column(grid) ** 2 * average - average @ (D @ D).T
    return ModalField(coefficients=values, grid=grid)


def dz(field: ModalField) -> ModalField:
    return field.with_coefficients(field.coefficients @ field.grid.dz_matrix.T)


@lru_cache(maxsize=512)
def wall_mode(grid: Grid, kappa: float) -> np.ndarray:
    """h with (d_z - |k'|) h = 0 at interior nodes, h = 1 at the wall and h = 0 at z_max."""
    matrix = grid.dz_matrix - kappa * np.identity(grid.Nz)
    matrix[0, :] = 0.0
    matrix[0, 0] = 1.0
    matrix[-1, :] = 0.0
    matrix[-1, -1] = 1.0
    rhs = np.zeros(grid.Nz)
    rhs[0] = 1.0
    return solve(matrix, rhs)


@lru_cache(maxsize=512)
def wall_response(grid: Grid, kappa: float, Nt: int, dt: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Response of v^z and u^z to a unit wall_mode added to phi on the first half level.

    Returns (v, u, slope) with v and u on full levels and slope[l] = d_z u at the
    wall on level l + 1.
    """
    time = TimeGrid(Nt=Nt, dt=dt)
    forcing = np.zeros((Nt, grid.Nz))
    forcing[0] = -kappa * wall_mode(grid, kappa)
    v = heat_mode(forcing, kappa, grid, time)
    u = fractional_forward_mode(v, kappa, grid)
    return v, u, (u[1:] @ grid.dz_matrix[0]).real


def _delayed(weights: np.ndarray, response: np.ndarray) -> np.ndarray:
    """sum_m weights[m] response[l - m] for every level l, with response[0] = 0."""
    total = np.zeros(response.shape, dtype=complex)
    levels = response.shape[0]
    for m, weight in enumerate(weights):
        total[m + 1 :] += weight * response[1 : levels - m]
    return total


def enforce_wall_slope(
    phi: ModalField, v_z: ModalField, u_z: ModalField, time: TimeGrid
) -> tuple[ModalField, ModalField, ModalField]:
    """Adds multiples of wall_mode to phi so that d_z u^z vanishes at the wall on every level.

    The weights solve a lower triangular Toeplitz system built from wall_response.
    """
    grid = phi.grid
    wall_row = grid.dz_matrix[0]
    phi_c, v_c, u_c = phi.coefficients.copy(), v_z.coefficients.copy(), u_z.coefficients.copy()
    for index in sorted(set(active_modes(v_z)) | set(active_modes(phi))):
        kappa = _kappa(grid, index)
        v_unit, u_unit, slope = wall_response(grid, kappa, time.Nt, time.dt)
        defect = u_c[1:, index, :] @ wall_row
        influence = toeplitz(slope, np.zeros(time.Nt))
        weights = solve_triangular(influence, -defect.real, lower=True)
        weights = weights + 1j * solve_triangular(influence, -defect.imag, lower=True)
        phi_c[:, index, :] += weights[:, np.newaxis] * wall_mode(grid, kappa)
        v_c[:, index, :] += _delayed(weights, v_unit)
        u_c[:, index, :] += _delayed(weights, u_unit)
    return phi.with_coefficients(phi_c), v_z.with_coefficients(v_c), u_z.with_coefficients(u_c)
