"""IMEX time stepping of the 2-D Boussinesq system in streamfunction-vorticity form.

Per horizontal mode k the scheme solves

    theta:  (1/dt - L_k/2) theta+ = (1/dt + L_k/2) theta + AB2[-u.grad theta + u^z]
    omega:  (1/(Pr dt) - L_k/2) omega+ = (...) omega + AB2[Ra ik theta - (u.grad omega)/Pr]
    psi:    L_k psi = omega,  psi = d_z psi = 0 at both walls

with L_k = d_z^2 - k^2. The two wall conditions on psi are met with an
influence matrix over boundary vorticity. The k = 0 mode carries the mean
horizontal flow and is advanced through its own momentum balance. For
Pr = inf the velocity is slaved to the new temperature through
-L_k^2 psi = Ra ik theta.
"""

import math

from functools import lru_cache

import numpy as np

from scipy.linalg import lu_factor, lu_solve

from common.errors import DivergenceError, StateError, StepSizeError
from domains.boussinesq.params import SimParams
from domains.boussinesq.state import State, conduction_profile
from domains.spectral.fields import ModalField
from domains.spectral.grid import Grid
from domains.spectral.linalg import LUFactor, dirichlet_rows, solve_real
from domains.spectral.transforms import dealias, to_modal, to_physical


class ModeOperators:
    """Factored per-mode matrices for one (grid, dt, Pr) combination."""

    def __init__(self, grid: Grid, dt: float, pr: float) -> None:
        self.grid = grid
        self.dt = dt
        self.infinite_prandtl = math.isinf(pr)
        n = grid.Nz
        identity = np.identity(n)
        D = grid.dz_matrix
        D2 = D @ D
        self.D = D
        self.D2 = D2
        self.half_modes = grid.Nx // 2
        k = grid.k_values[: self.half_modes]
        self.k = k

        self.temperature = [lu_factor(dirichlet_rows(identity / dt - 0.5 * (D2 - kk**2 * identity))) for kk in k]

        if self.infinite_prandtl:
            alpha, beta = 0.0, 1.0
        else:
            alpha, beta = 1.0 / (pr * dt), 0.5
        self.alpha = alpha
        self.beta = beta

        mean_matrix = alpha * identity - beta * D2 if not self.infinite_prandtl else D2
        self.mean_flow = lu_factor(dirichlet_rows(mean_matrix))
        integrate = D.copy()
        integrate[0, :] = 0.0
        integrate[0, 0] = 1.0
        self.integrate = lu_factor(integrate)

        self.vorticity: list[LUFactor | None] = [None]
        self.poisson: list[LUFactor | None] = [None]
        self.homogeneous: list[tuple[np.ndarray, np.ndarray] | None] = [None]
        self.influence: list[np.ndarray | None] = [None]
        for kk in k[1:]:
            L = D2 - kk**2 * identity
            vort = lu_factor(dirichlet_rows(alpha * identity - beta * L))
            pois = lu_factor(dirichlet_rows(L))
            boundary = np.zeros((n, 2))
            boundary[0, 0] = 1.0
            boundary[-1, 1] = 1.0
            omega_h = lu_solve(vort, boundary)
            rhs = omega_h.copy()
            rhs[0, :] = 0.0
            rhs[-1, :] = 0.0
            psi_h = lu_solve(pois, rhs)
            slopes = np.array([D[0] @ psi_h, D[-1] @ psi_h])
            self.vorticity.append(vort)
            self.poisson.append(pois)
            self.homogeneous.append((omega_h, psi_h))
            self.influence.append(np.linalg.inv(slopes))

    def laplacian(self, coefficients: np.ndarray, index: int) -> np.ndarray:
        return coefficients @ self.D2.T - self.k[index] ** 2 * coefficients

    def clamped_solve(self, index: int, rhs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(alpha - beta L) omega = rhs inside; L psi = omega; psi = d_z psi = 0 at the walls."""
        vort, pois, homogeneous, influence = (
            self.vorticity[index],
            self.poisson[index],
            self.homogeneous[index],
            self.influence[index],
        )
        assert vort is not None and pois is not None and homogeneous is not None and influence is not None
        rhs = rhs.copy()
        rhs[0] = rhs[-1] = 0.0
        omega = solve_real(vort, rhs)
        inner = omega.copy()
        inner[0] = inner[-1] = 0.0
        psi = solve_real(pois, inner)
        slopes = np.array([self.D[0] @ psi, self.D[-1] @ psi])
        weights = -influence @ slopes
        omega_h, psi_h = homogeneous
        return psi + psi_h @ weights, omega + omega_h @ weights


@lru_cache(maxsize=8)
def mode_operators(grid: Grid, dt: float, pr: float) -> ModeOperators:
    return ModeOperators(grid, dt, pr)


def _mirror(half: np.ndarray, grid: Grid) -> np.ndarray:
    full = np.zeros((grid.Nx,) + half.shape[1:], dtype=complex)
    m = grid.Nx // 2
    full[:m] = half
    full[m + 1 :] = np.conj(half[1:][::-1])
    full[0] = full[0].real
    return full


def _local_spacing(z: np.ndarray) -> np.ndarray:
    gaps = np.diff(z)
    spacing = np.empty_like(z)
    spacing[0], spacing[-1] = gaps[0], gaps[-1]
    spacing[1:-1] = np.minimum(gaps[:-1], gaps[1:])
    return spacing


def courant_number(state: State, dt: float) -> float:
    grid = state.grid
    u_hat, w_hat = state.velocity()
    u = to_physical(u_hat, grid)
    w = to_physical(w_hat, grid)
    rate = np.abs(u) / (grid.L / grid.Nx) + np.abs(w) / _local_spacing(grid.z_nodes)
    return float(dt * np.max(rate))


def explicit_terms(state: State, params: SimParams) -> np.ndarray:
    """Stacked advective/buoyancy tendencies: [theta, omega, mean flow], each (Nx, Nz)."""
    grid = state.grid
    ik = 1j * grid.k_values[:, np.newaxis]
    D = grid.dz_matrix
    theta = state.theta
    omega = state.omega.coefficients
    u_hat, w_hat = state.velocity()

    u = to_physical(u_hat, grid)
    w = to_physical(w_hat, grid)
    theta_x = to_physical(ik * theta, grid)
    theta_z = to_physical(theta @ D.T, grid)
    omega_x = to_physical(ik * omega, grid)
    omega_z = to_physical(omega @ D.T, grid)

    tendencies = np.zeros((3, grid.Nx, grid.Nz), dtype=complex)
    tendencies[0] = dealias(to_modal(-(u * theta_x + w * theta_z) + w, grid), grid)
    if not params.infinite_prandtl:
        advection = dealias(to_modal(u * omega_x + w * omega_z, grid), grid)
        buoyancy = params.Ra * ik * theta
        tendencies[1] = buoyancy - params.inverse_pr * advection
        tendencies[2, 0] = -params.inverse_pr * (D @ np.mean(u * w, axis=0))
    return tendencies


def _check_finite(coefficients: np.ndarray, what: str, t: float) -> None:
    if not np.all(np.isfinite(coefficients)):
        raise DivergenceError(message=f"non-finite {what} after step ending at t={t:.6g}")


def step(state: State, params: SimParams) -> State:
    grid = state.grid
    if grid != params.grid:
        raise StateError(message="state grid does not match params resolution")
    courant = courant_number(state, params.dt)
    if courant > params.cfl_limit:
        raise StepSizeError(message=f"CFL number {courant:.3f} exceeds limit {params.cfl_limit}")

    ops = mode_operators(grid, params.dt, params.Pr)
    m = ops.half_modes
    current = explicit_terms(state, params)
    if state.history is None:
        combined = current
    else:
        combined = 1.5 * current - 0.5 * state.history

    theta = state.theta
    theta_new = np.empty((m, grid.Nz), dtype=complex)
    for index in range(m):
        rhs = theta[index] / params.dt + 0.5 * ops.laplacian(theta[index], index) + combined[0, index]
        rhs[0] = rhs[-1] = 0.0
        theta_new[index] = solve_real(ops.temperature[index], rhs)

    psi_new = np.empty((m, grid.Nz), dtype=complex)
    omega_new = np.empty((m, grid.Nz), dtype=complex)
    omega = state.omega.coefficients
    psi = state.psi.coefficients
    if ops.infinite_prandtl:
        psi_new[0] = 0.0
        omega_new[0] = 0.0
        for index in range(1, m):
            forcing = params.Ra * 1j * ops.k[index] * theta_new[index]
            psi_new[index], omega_new[index] = ops.clamped_solve(index, forcing)
    else:
        mean_u = -(ops.D @ psi[0])
        rhs = ops.alpha * mean_u + ops.beta * (ops.D2 @ mean_u) + combined[2, 0]
        rhs[0] = rhs[-1] = 0.0
        mean_new = solve_real(ops.mean_flow, rhs)
        rhs = -mean_new
        rhs[0] = 0.0
        psi_new[0] = solve_real(ops.integrate, rhs)
        omega_new[0] = -(ops.D @ mean_new)
        for index in range(1, m):
            rhs = ops.alpha * omega[index] + ops.beta * ops.laplacian(omega[index], index) + combined[1, index]
            psi_new[index], omega_new[index] = ops.clamped_solve(index, rhs)

    t_new = state.t + params.dt
    T_full = _mirror(theta_new, grid)
    T_full[0] += conduction_profile(grid)
    psi_full = _mirror(psi_new, grid)
    omega_full = _mirror(omega_new, grid)
    for coefficients, name in ((T_full, "temperature"), (psi_full, "streamfunction"), (omega_full, "vorticity")):
        _check_finite(coefficients, name, t_new)

    return State(
        T=ModalField(coefficients=T_full, grid=grid),
        psi=ModalField(coefficients=psi_full, grid=grid),
        omega=ModalField(coefficients=omega_full, grid=grid),
        t=t_new,
        step_index=state.step_index + 1,
        history=current,
    )


def conduction_state(params: SimParams) -> State:
    grid = params.grid
    T = np.zeros((grid.Nx, grid.Nz), dtype=complex)
    T[0] = conduction_profile(grid)
    zero = ModalField.zeros(grid)
    return State(T=ModalField(coefficients=T, grid=grid), psi=zero, omega=zero)


def init_state(params: SimParams, seed: int, amplitude: float) -> State:
    """Conduction plus a seeded perturbation in the lowest modes, clamped to T in [0, 1]."""
    base = conduction_state(params)
    if amplitude == 0.0:
        return base
    grid = params.grid
    rng = np.random.default_rng(seed)
    x = grid.x_nodes[:, np.newaxis]
    z = grid.z_nodes[np.newaxis, :]
    perturbation = np.zeros((grid.Nx, grid.Nz))
    for n in range(1, min(4, grid.Nx // 2)):
        for m in (1, 2):
            phase = rng.uniform(0.0, 2.0 * np.pi)
            weight = rng.uniform(-1.0, 1.0)
            perturbation += weight * np.cos(2.0 * np.pi * n * x / grid.L + phase) * np.sin(m * np.pi * z)
    scale = np.max(np.abs(perturbation))
    if scale > 0.0:
        perturbation *= amplitude / scale
    T = np.clip(1.0 - z + perturbation, 0.0, 1.0)
    return state_from_physical(T, np.zeros_like(T), grid)


def state_from_physical(T: np.ndarray, psi: np.ndarray, grid: Grid, t: float = 0.0) -> State:
    psi_hat = to_modal(psi, grid)
    psi_hat[grid.nyquist_index] = 0.0
    T_hat = to_modal(T, grid)
    T_hat[grid.nyquist_index] = 0.0
    omega_hat = psi_hat @ (grid.dz_matrix @ grid.dz_matrix).T - grid.k_values[:, np.newaxis] ** 2 * psi_hat
    return State(
        T=ModalField(coefficients=T_hat, grid=grid),
        psi=ModalField(coefficients=psi_hat, grid=grid),
        omega=ModalField(coefficients=omega_hat, grid=grid),
        t=float(t),
    )
