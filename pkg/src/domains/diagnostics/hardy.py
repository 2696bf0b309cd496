import numpy as np

from domains.boussinesq.state import State
from domains.diagnostics.quadrature import singular_integral
from domains.spectral.transforms import horizontal_average_product, integrate_vertical, to_physical


def dissipation_integral(state: State) -> float:
    """int <|grad u|^2>' dz for the velocity of `state`."""
    grid = state.grid
    D = grid.dz_matrix
    ik = 1j * grid.k_values[:, np.newaxis]
    u, w = state.velocity()
    profile = sum(horizontal_average_product(g, g) for g in (ik * u, u @ D.T, ik * w, w @ D.T))
    return integrate_vertical(np.asarray(profile), grid)


def advection_profile(state: State) -> np.ndarray:
    """<|(u.grad)u|>' per height, evaluated on the physical grid."""
    grid = state.grid
    D = grid.dz_matrix
    ik = 1j * grid.k_values[:, np.newaxis]
    u_hat, w_hat = state.velocity()
    u = to_physical(u_hat, grid)
    w = to_physical(w_hat, grid)
    advect_u = u * to_physical(ik * u_hat, grid) + w * to_physical(u_hat @ D.T, grid)
    advect_w = u * to_physical(ik * w_hat, grid) + w * to_physical(w_hat @ D.T, grid)
    return np.mean(np.hypot(advect_u, advect_w), axis=0)


def hardy_nonlinearity_ratio(state: State) -> float:
    """[int <|(u.grad)u|>' dz/z] / [int <|grad u|^2>' dz]; 0 for a fluid at rest."""
    denominator = dissipation_integral(state)
    if denominator <= 0.0:
        return 0.0
    scale = max(1.0, float(np.max(np.abs(state.psi.coefficients))))
    numerator = singular_integral(advection_profile(state), state.grid.z_nodes, "upper", tolerance=1e-10 * scale)
    return numerator / denominator
