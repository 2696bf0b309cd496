"""No-slip Stokes flow in the upper half space as a fourfold composition.

For each horizontal mode, with H the heat operator and |k'| = kappa:

    phi  = backward fractional solve of  ik.f' + d_z f^z - H rho
    v^z  = heat solve of                 kappa (f^z - phi) - ik.f' + H rho
    u^z  = forward fractional solve of   v^z, u^z(0) = 0
    v'   = heat solve of                 (1 - k k^T/kappa^2) f'
    u'   = v' - (ik/kappa^2)(rho - d_z u^z)
    p    = (phi - f^z + H u^z) / kappa

phi equals (d_z + kappa) p and v^z equals (d_z + kappa) u^z. On the grid the
wall condition d_z u^z = rho = 0 is restored by adding a boundary layer to phi
level by level (see enforce_wall_slope), so momentum holds at every interior
node and the top node carries the decay conditions of the exact solution.
"""

import numpy as np

from common.console import log_debug
from common.errors import StageError
from domains.spectral.fields import ModalField
from domains.stokes.elementary import (
    apply_heat,
    dz,
    enforce_wall_slope,
    inverse_kappa_squared,
    solve_fractional_backward,
    solve_fractional_forward,
    solve_heat_dirichlet,
    solve_heat_horizontal,
    wavenumber_column,
)
from domains.stokes.problems import HORIZONTAL, VERTICAL, HalfSpaceProblem, StokesSolution, TimeGrid


SOLUTION_TOLERANCE = 1e-5


def _max_abs(values: np.ndarray) -> float:
    return float(np.max(np.abs(values), initial=0.0))


def stokes_residuals(
    u: ModalField, p: ModalField, f: ModalField, rho: ModalField, time: TimeGrid
) -> dict[str, float]:
    """Relative momentum, divergence and wall residuals of a candidate solution.

    Momentum is measured at interior nodes, the divergence everywhere and the
    no-slip condition at z = 0.
    """
    grid = u.grid
    ik = 1j * wavenumber_column(grid)
    D = grid.dz_matrix
    uc, pc, fc, rc = u.coefficients, p.coefficients, f.coefficients, rho.coefficients
    H_h = apply_heat(ModalField(coefficients=uc[:, HORIZONTAL], grid=grid), time).coefficients
    H_z = apply_heat(ModalField(coefficients=uc[:, VERTICAL], grid=grid), time).coefficients
    H_rho = apply_heat(rho, time).coefficients

    scale = max(_max_abs(fc), _max_abs(H_rho), _max_abs(rc), 1e-300)
    horizontal = H_h + ik * pc - fc[:, HORIZONTAL]
    vertical = H_z + pc @ D.T - fc[:, VERTICAL]
    divergence = ik * uc[:, HORIZONTAL] + uc[:, VERTICAL] @ D.T - rc
    return {
        "momentum": max(_max_abs(horizontal[..., 1:-1]), _max_abs(vertical[..., 1:-1])) / scale,
        "divergence": _max_abs(divergence) / scale,
        "no_slip": _max_abs(uc[..., 0]) / scale,
    }


def check_residuals(residuals: dict[str, float], tolerance: float) -> None:
    for stage, residual in residuals.items():
        if residual > tolerance:
            raise StageError(message="solution check failed", stage=stage, residual=residual, tolerance=tolerance)


def stokes_halfspace(problem: HalfSpaceProblem, tolerance: float = SOLUTION_TOLERANCE) -> StokesSolution:
    grid, time = problem.grid, problem.time
    ik = 1j * wavenumber_column(grid)
    kappa = np.abs(wavenumber_column(grid))
    inverse_k2 = inverse_kappa_squared(grid)

    f_h = ModalField(coefficients=problem.f.coefficients[:, HORIZONTAL], grid=grid)
    f_z = ModalField(coefficients=problem.f.coefficients[:, VERTICAL], grid=grid)
    H_rho = apply_heat(problem.rho, time).coefficients

    phi = solve_fractional_backward(
        f_h.with_coefficients(ik * f_h.coefficients + dz(f_z).coefficients - H_rho)
    )
    v_z = solve_heat_dirichlet(
        f_z.with_coefficients(kappa * (f_z.coefficients - phi.coefficients) - ik * f_h.coefficients + H_rho), time
    )
    u_z = solve_fractional_forward(v_z)
    phi, v_z, u_z = enforce_wall_slope(phi, v_z, u_z, time)
    v_h = solve_heat_horizontal(f_h, time)

    u_h = v_h.coefficients - ik * inverse_k2 * (problem.rho.coefficients - dz(u_z).coefficients)
    H_uz = apply_heat(u_z, time).coefficients
    p = np.sqrt(inverse_k2) * (phi.coefficients - f_z.coefficients + H_uz)

    u = ModalField(coefficients=np.stack([u_h, u_z.coefficients], axis=1), grid=grid)
    pressure = ModalField(coefficients=p, grid=grid)
    residuals = stokes_residuals(u, pressure, problem.f, problem.rho, time)
    log_debug("stokes.halfspace", **residuals)
    check_residuals(residuals, tolerance)
    return StokesSolution(u=u, p=pressure, time=time, phi=phi, v_z=v_z, v_h=v_h, residuals=residuals)
