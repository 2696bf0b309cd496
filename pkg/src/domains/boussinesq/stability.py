"""Linear stability of the conduction state.

Per wavenumber k the perturbation (w, theta) ~ exp(sigma t + ikx) obeys

    (sigma/Pr) L w = L^2 w - Ra k^2 theta,   sigma theta = L theta + w,

with L = d_z^2 - k^2, w = d_z w = 0 and theta = 0 at both walls. Boundary
rows replace the equations at the first two and last two nodes of w and at
the end nodes of theta; their B rows vanish, which pushes the matching
eigenvalues to infinity where they are filtered out.
"""

import numpy as np

from scipy.linalg import LinAlgError, eig
from scipy.optimize import brentq, minimize_scalar

from common.base import BaseFrozen
from common.console import log_debug
from common.errors import NumericalError, ParameterError
from domains.boussinesq.params import SimParams
from domains.spectral.grid import chebyshev_operator


SPURIOUS_MAGNITUDE = 1e10


def _pencil(Ra: float, inverse_pr: float, k: float, n_points: int) -> tuple[np.ndarray, np.ndarray]:
    _, D = chebyshev_operator(n_points, 1.0)
    n = n_points
    identity = np.identity(n)
    L = D @ D - k**2 * identity

    A = np.zeros((2 * n, 2 * n))
    B = np.zeros((2 * n, 2 * n))
    A[:n, :n] = L @ L
    A[:n, n:] = -Ra * k**2 * identity
    B[:n, :n] = inverse_pr * L
    A[n:, :n] = identity
    A[n:, n:] = L
    B[n:, n:] = identity

    for row, condition in ((0, identity[0]), (n - 1, identity[-1]), (1, D[0]), (n - 2, D[-1])):
        A[row, :] = 0.0
        B[row, :] = 0.0
        A[row, :n] = condition
    for row in (n, 2 * n - 1):
        A[row, :] = 0.0
        B[row, :] = 0.0
        A[row, row] = 1.0
    return A, B


def linear_growth_rate(params: SimParams, k: float) -> float:
    if not k > 0.0:
        raise ParameterError(message=f"wavenumber must be positive, got {k}")
    A, B = _pencil(params.Ra, params.inverse_pr, k, params.Nz)
    try:
        eigenvalues = eig(A, B, right=False)
    except (LinAlgError, ValueError) as error:
        raise NumericalError(message=f"generalized eigenproblem failed at k={k}: {error}") from error
    finite = eigenvalues[np.isfinite(eigenvalues)]
    finite = finite[np.abs(finite) < SPURIOUS_MAGNITUDE]
    if finite.size == 0:
        raise NumericalError(message=f"no finite eigenvalues at k={k}")
    return float(np.max(finite.real))


class CriticalPoint(BaseFrozen):
    Ra: float
    k: float


def max_growth_rate(params: SimParams, k_bounds: tuple[float, float] = (1.5, 5.0)) -> tuple[float, float]:
    """(rate, k) of the fastest-growing wavenumber inside k_bounds."""
    search = minimize_scalar(
        lambda k: -linear_growth_rate(params, float(k)), bounds=k_bounds, method="bounded", options={"xatol": 1e-6}
    )
    return float(-search.fun), float(search.x)


def critical_rayleigh(
    params: SimParams, ra_low: float = 1690.0, ra_high: float = 1730.0, k_bounds: tuple[float, float] = (1.5, 5.0)
) -> CriticalPoint:
    """Ra where the maximal growth rate changes sign, bracketed by [ra_low, ra_high]."""

    def rate(Ra: float) -> float:
        value, k = max_growth_rate(params.model_copy(update={"Ra": float(Ra)}), k_bounds)
        log_debug("stability.probe", Ra=Ra, k=k, rate=value)
        return value

    low, high = rate(ra_low), rate(ra_high)
    if low * high > 0.0:
        raise NumericalError(message=f"growth rate does not change sign in Ra in [{ra_low:g}, {ra_high:g}]")
    Ra_c = float(brentq(rate, ra_low, ra_high, xtol=1e-6))
    _, k_c = max_growth_rate(params.model_copy(update={"Ra": Ra_c}), k_bounds)
    return CriticalPoint(Ra=Ra_c, k=k_c)
