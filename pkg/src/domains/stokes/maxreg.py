"""Weighted maximal-regularity ratios of Stokes solutions.

Every term is evaluated on the half levels, reduced to the profile
g(z) = time mean of <|.|>'(z), and measured with the interpolation norm
whose weight matches the domain (1/(z(1-z)) on the strip, 1/z on the half
space). The time mean over [0, t0] stands in for the long-time average.
"""

from typing import Any, Dict, Optional

import numpy as np

from common.base import BaseFrozen
from domains.diagnostics.norms import weighted_interpolation_norm
from domains.diagnostics.quadrature import WeightKind
from domains.spectral.fields import ModalField
from domains.spectral.grid import Grid
from domains.spectral.transforms import to_physical
from domains.stokes.elementary import inverse_kappa_squared, wavenumber_column
from domains.stokes.problems import HORIZONTAL, VERTICAL, Domain, StokesSolution, TimeGrid


LHS_TERMS = ("dt_minus_dzz_u_h", "grad_h_grad_u_h", "dt_u_z", "hessian_u_z", "grad_p")
RHO_TERMS = ("dt_rho", "dzz_rho", "grad_rho")


class MaxRegReport(BaseFrozen):
    lhs_terms: dict[str, float]
    f_norm: float
    rho_norms: dict[str, float]
    ratio: float
    grid: dict[str, float]
    R: float
    domain: Domain

    def to_json(self) -> Dict[str, Any]:
        return {
            "lhs_terms": dict(self.lhs_terms),
            "f_norm": self.f_norm,
            "rho_norms": dict(self.rho_norms),
            "ratio": self.ratio,
            "grid": dict(self.grid),
            "R": self.R,
            "domain": self.domain,
        }


def _weight_for(domain: Domain) -> WeightKind:
    return "strip" if domain == "strip" else "upper"


def _magnitude(grid: Grid, *components: np.ndarray, weights: tuple[float, ...] = ()) -> np.ndarray:
    """Pointwise sqrt(sum w_i c_i^2) of physical components given by their coefficients."""
    factors = weights or (1.0,) * len(components)
    squares = sum(w * to_physical(c, grid) ** 2 for w, c in zip(factors, components))
    return np.sqrt(np.asarray(squares))


def _profile(values: np.ndarray) -> np.ndarray:
    """Mean over time and x of |values|, leaving z."""
    return np.mean(np.abs(values), axis=tuple(range(values.ndim - 1)))


def _norm(values: np.ndarray, grid: Grid, domain: Domain) -> float:
    return weighted_interpolation_norm(_profile(values), grid.z_nodes, _weight_for(domain)).k_value


def _terms(u: np.ndarray, p: np.ndarray, grid: Grid, time: TimeGrid) -> dict[str, np.ndarray]:
    ik = 1j * wavenumber_column(grid)
    D = grid.dz_matrix
    D2 = D @ D
    u_h, u_z = u[:, HORIZONTAL], u[:, VERTICAL]
    mid_h = 0.5 * (u_h[1:] + u_h[:-1])
    mid_z = 0.5 * (u_z[1:] + u_z[:-1])
    return {
        "dt_minus_dzz_u_h": to_physical((u_h[1:] - u_h[:-1]) / time.dt - mid_h @ D2.T, grid),
        "grad_h_grad_u_h": _magnitude(grid, ik**2 * mid_h, ik * (mid_h @ D.T)),
        "dt_u_z": to_physical((u_z[1:] - u_z[:-1]) / time.dt, grid),
        "hessian_u_z": _magnitude(
            grid, ik**2 * mid_z, ik * (mid_z @ D.T), mid_z @ D2.T, weights=(1.0, 2.0, 1.0)
        ),
        "grad_p": _magnitude(grid, ik * p, p @ D.T),
    }


def _rho_terms(rho: np.ndarray, grid: Grid, time: TimeGrid) -> dict[str, np.ndarray]:
    ik = 1j * wavenumber_column(grid)
    D = grid.dz_matrix
    inverse_kappa = np.sqrt(inverse_kappa_squared(grid))
    mid = 0.5 * (rho[1:] + rho[:-1])
    return {
        "dt_rho": to_physical(inverse_kappa * (rho[1:] - rho[:-1]) / time.dt, grid),
        "dzz_rho": to_physical(inverse_kappa * (mid @ (D @ D).T), grid),
        "grad_rho": _magnitude(grid, ik * mid, mid @ D.T),
    }


def maxreg_report(
    solution: StokesSolution, f: ModalField, R: float, domain: Domain, rho: Optional[ModalField] = None
) -> MaxRegReport:
    grid, time = solution.grid, solution.time
    lhs = {
        name: _norm(values, grid, domain)
        for name, values in _terms(solution.u.coefficients, solution.p.coefficients, grid, time).items()
    }
    f_values = _magnitude(grid, f.coefficients[:, HORIZONTAL], f.coefficients[:, VERTICAL])
    f_norm = _norm(f_values, grid, domain)
    rho_norms: dict[str, float] = {}
    if domain == "half" and rho is not None:
        rho_norms = {name: _norm(values, grid, domain) for name, values in _rho_terms(rho.coefficients, grid, time).items()}
    data = f_norm + sum(rho_norms.values())
    ratio = sum(lhs.values()) / data if data > 0.0 else 0.0
    return MaxRegReport(
        lhs_terms=lhs,
        f_norm=f_norm,
        rho_norms=rho_norms,
        ratio=float(ratio),
        grid={"Nx": float(grid.Nx), "Nz": float(grid.Nz), "Nt": float(time.Nt), "z_max": grid.height, "L": grid.L},
        R=float(R),
        domain=domain,
    )
