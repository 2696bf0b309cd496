"""Stokes flow in the strip 0 < z < 1 and its localisation to half spaces."""

from typing import Literal

import numpy as np

from scipy.special import erfc

from common.console import log_debug
from common.errors import LocalizationError
from domains.spectral.fields import ModalField
from domains.stokes.direct import solve_all_modes
from domains.stokes.halfspace import SOLUTION_TOLERANCE, check_residuals, stokes_residuals
from domains.stokes.problems import HORIZONTAL, VERTICAL, HalfSpaceProblem, StokesSolution, StripProblem


Side = Literal["lower", "upper"]

CUTOFF_CENTER = 0.3
CUTOFF_WIDTH = 0.08
LOCALIZATION_TOLERANCE = 1e-5


def stokes_strip(problem: StripProblem, tolerance: float = SOLUTION_TOLERANCE) -> StokesSolution:
    rho = ModalField.zeros(problem.grid, (problem.time.Nt + 1,))
    u, p, worst = solve_all_modes(problem.f, rho, problem.time, "strip")
    residuals = stokes_residuals(u, p, problem.f, rho, problem.time)
    residuals["no_slip"] = max(residuals["no_slip"], float(np.max(np.abs(u.coefficients[..., -1]), initial=0.0)))
    check_residuals(residuals, tolerance)
    log_debug("stokes.strip", linear_system=worst, **residuals)
    return StokesSolution(u=u, p=p, time=problem.time, residuals={**residuals, "linear_system": worst})


def cutoff(z: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """eta = erfc((z - c)/w)/2 with its first two derivatives; eta = 1 near z = 0 and vanishes past z = 1/2."""
    s = (np.asarray(z, dtype=float) - CUTOFF_CENTER) / CUTOFF_WIDTH
    gaussian = np.exp(-(s**2)) / (CUTOFF_WIDTH * np.sqrt(np.pi))
    return 0.5 * erfc(s), -gaussian, 2.0 * s / CUTOFF_WIDTH * gaussian


def reflect(u: np.ndarray, vertical_axis: int | None) -> np.ndarray:
    """z -> 1 - z on symmetric nodes; the vertical component (if any) changes sign."""
    mirrored = np.array(u[..., ::-1], dtype=complex)
    if vertical_axis is not None:
        index = [slice(None)] * mirrored.ndim
        index[vertical_axis] = VERTICAL
        mirrored[tuple(index)] *= -1.0
    return mirrored


def localize_to_halfspace(
    solution: StokesSolution, problem: StripProblem, side: Side, tolerance: float = LOCALIZATION_TOLERANCE
) -> HalfSpaceProblem:
    """Data (f~, rho~) for which (eta u, eta p) solves the half-space problem near the chosen wall.

    f~ = eta f - 2 eta' d_z u - eta'' u + eta' p e_z and rho~ = eta' u^z. The
    upper wall is handled in the reflected variable 1 - z.
    """
    grid, time = problem.grid, problem.time
    u = solution.u.coefficients
    p = solution.p.coefficients
    f = problem.f.coefficients
    if side == "upper":
        u, p, f = reflect(u, 1), reflect(p, None), reflect(f, 1)

    eta, eta_1, eta_2 = cutoff(grid.z_nodes)
    D = grid.dz_matrix
    u_half = 0.5 * (u[1:] + u[:-1])
    f_local = eta * f - 2.0 * eta_1 * (u_half @ D.T) - eta_2 * u_half
    f_local[:, VERTICAL] += eta_1 * p
    rho_local = eta_1 * u[:, VERTICAL]

    localized = HalfSpaceProblem(
        f=ModalField(coefficients=f_local, grid=grid),
        rho=ModalField(coefficients=rho_local, grid=grid),
        R=problem.R,
        time=time,
    )
    candidate_u = ModalField(coefficients=eta * u, grid=grid)
    candidate_p = ModalField(coefficients=eta * p, grid=grid)
    residuals = stokes_residuals(candidate_u, candidate_p, localized.f, localized.rho, time)
    worst = max(residuals["momentum"], residuals["divergence"])
    if worst > tolerance:
        raise LocalizationError(message=f"cut-off solution misses the half-space problem ({side})", residual=worst)
    return localized
