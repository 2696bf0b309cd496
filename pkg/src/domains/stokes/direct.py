"""Monolithic per-mode Stokes solver in (u^z, p), independent of the decomposition.

Per mode and half step the unknowns are u^z at t_{n+1} and p at t_{n+1/2}:

    (I/dt + M/2) u+ + D p        = (I/dt - M/2) u + f^z
    D (I/dt + M/2) u+ + kappa^2 p = D (I/dt - M/2) u - ik f' + H rho

The second line is horizontal momentum combined with the divergence
constraint. Walls impose u^z = 0 and d_z u^z = rho; on a truncated half
space the top rows impose (d_z + kappa) u^z = 0 and vertical momentum with
d_z p replaced by -kappa p, the decay conditions of the exact solution.
u' follows from the divergence and a heat solve of the solenoidal part of f'.
"""

from functools import lru_cache

import numpy as np

from scipy.linalg import lu_factor

from common.base import BaseFrozenArbitrary
from common.errors import NumericalError, SingularModeError
from domains.spectral.fields import ModalField
from domains.spectral.grid import Grid
from domains.spectral.linalg import LUFactor, solve_real
from domains.stokes.elementary import active_modes, heat_mode, heat_operator, heat_symbol, horizontal_projector
from domains.stokes.halfspace import SOLUTION_TOLERANCE, check_residuals, stokes_residuals
from domains.stokes.problems import HORIZONTAL, VERTICAL, Domain, HalfSpaceProblem, StokesSolution, TimeGrid


RESIDUAL_TOLERANCE = 1e-8


class DirectModeSolution(BaseFrozenArbitrary):
    k: float
    u_h: np.ndarray
    u_z: np.ndarray
    p: np.ndarray
    residual: float


@lru_cache(maxsize=512)
def _system(grid: Grid, kappa: float, dt: float, domain: Domain) -> tuple[np.ndarray, LUFactor, np.ndarray]:
    n = grid.Nz
    D = grid.dz_matrix
    identity = np.identity(n)
    M = heat_symbol(grid, kappa)
    implicit = identity / dt + 0.5 * M
    explicit = identity / dt - 0.5 * M

    system = np.zeros((2 * n, 2 * n))
    system[:n, :n] = implicit
    system[:n, n:] = D
    system[n:, :n] = D @ implicit
    system[n:, n:] = kappa**2 * identity

    top, bottom = 0, n - 1
    system[top, :] = 0.0
    system[top, top] = 1.0
    system[n + top, :] = 0.0
    system[n + top, :n] = D[0]
    system[bottom, :] = 0.0
    system[n + bottom, :] = 0.0
    match domain:
        case "half":
            system[bottom, :n] = D[-1]
            system[bottom, bottom] += kappa
            system[n + bottom, :n] = implicit[-1]
            system[n + bottom, n + bottom] = -kappa
        case "strip":
            system[bottom, bottom] = 1.0
            system[n + bottom, :n] = D[-1]
    return system, lu_factor(system), explicit


def stokes_direct_mode(
    k: float, f: np.ndarray, rho: np.ndarray, grid: Grid, time: TimeGrid, domain: Domain = "half"
) -> DirectModeSolution:
    """Solves one mode; f has shape (Nt, 2, Nz) on half levels and rho (Nt + 1, Nz) on full levels."""
    kappa = abs(float(k))
    if kappa == 0.0:
        raise SingularModeError(message="the direct solver needs a nonzero horizontal wavenumber")
    n = grid.Nz
    if f.shape != (time.Nt, 2, n) or rho.shape != (time.Nt + 1, n):
        raise NumericalError(message=f"direct solver got f{f.shape} and rho{rho.shape} for Nt={time.Nt}, Nz={n}")
    D = grid.dz_matrix
    system, factor, explicit = _system(grid, kappa, time.dt, domain)
    H_rho = heat_operator(rho, kappa, grid, time)

    u_z = np.zeros((time.Nt + 1, n), dtype=complex)
    p = np.zeros((time.Nt, n), dtype=complex)
    interior = np.r_[2 : n - 2, n + 2 : 2 * n - 2]
    worst = 0.0
    for step in range(time.Nt):
        carried = explicit @ u_z[step]
        rhs = np.concatenate([carried + f[step, VERTICAL], D @ carried - 1j * k * f[step, HORIZONTAL] + H_rho[step]])
        rhs[0] = 0.0
        rhs[n] = rho[step + 1, 0]
        match domain:
            case "half":
                rhs[n - 1] = 0.0
                rhs[2 * n - 1] = carried[-1] + f[step, VERTICAL, -1]
            case "strip":
                rhs[n - 1] = 0.0
                rhs[2 * n - 1] = rho[step + 1, -1]
        solution = solve_real(factor, rhs)
        defect = system[interior] @ solution - rhs[interior]
        worst = max(worst, float(np.max(np.abs(defect))) / max(float(np.max(np.abs(rhs))), 1e-300))
        u_z[step + 1] = solution[:n]
        p[step] = solution[n:]

    if worst > RESIDUAL_TOLERANCE:
        raise NumericalError(message=f"direct solve residual {worst:.3e} above {RESIDUAL_TOLERANCE:.0e}")

    solenoidal = horizontal_projector(np.array([[float(k)]]))[0, 0, 0]
    v_h = heat_mode(solenoidal * f[:, HORIZONTAL], kappa, grid, time)
    u_h = v_h - (1j * k / kappa**2) * (rho - u_z @ D.T)
    return DirectModeSolution(k=float(k), u_h=u_h, u_z=u_z, p=p, residual=worst)


def solve_all_modes(
    f: ModalField, rho: ModalField, time: TimeGrid, domain: Domain
) -> tuple[ModalField, ModalField, float]:
    """Runs the direct solver on every mode carrying data; returns (u, p, worst residual)."""
    grid = f.grid
    u = np.zeros((time.Nt + 1, 2, grid.Nx, grid.Nz), dtype=complex)
    p = np.zeros((time.Nt, grid.Nx, grid.Nz), dtype=complex)
    modes = sorted(set(active_modes(f)) | set(active_modes(rho)))
    worst = 0.0
    for index in modes:
        mode = stokes_direct_mode(
            float(grid.k_values[index]), f.coefficients[..., index, :], rho.coefficients[..., index, :], grid, time, domain
        )
        u[:, HORIZONTAL, index] = mode.u_h
        u[:, VERTICAL, index] = mode.u_z
        p[:, index] = mode.p
        worst = max(worst, mode.residual)
    return ModalField(coefficients=u, grid=grid), ModalField(coefficients=p, grid=grid), worst


def stokes_direct(problem: HalfSpaceProblem, tolerance: float = SOLUTION_TOLERANCE) -> StokesSolution:
    u, p, worst = solve_all_modes(problem.f, problem.rho, problem.time, "half")
    residuals = {**stokes_residuals(u, p, problem.f, problem.rho, problem.time), "linear_system": worst}
    check_residuals({key: value for key, value in residuals.items() if key != "linear_system"}, tolerance)
    return StokesSolution(u=u, p=p, time=problem.time, residuals=residuals)
