"""Heat-kernel estimates, the reflected-kernel bound and a Duhamel reference solver.

Gamma_1(z, t) = t^{-1/2} exp(-z^2/(4t)) and Gamma_m(x', t) its m-dimensional
analogue. Each quantity is scaled by the power of t that makes it exactly
t-independent, so sampled values should agree across t.
"""

import math

from typing import Any, Callable, Dict, Sequence

import numpy as np

from scipy.integrate import quad
from scipy.optimize import minimize_scalar
from scipy.special import gamma as gamma_function
from scipy.special import roots_hermite, roots_legendre

from common.base import BaseFrozen
from common.errors import ParameterError


Kernel = Callable[[np.ndarray | float], np.ndarray | float]

T_RANGE = (1e-3, 1e3)


def gamma_1(z: np.ndarray | float, t: float) -> np.ndarray | float:
    return np.exp(-np.square(z) / (4.0 * t)) / math.sqrt(t)


def gamma_1_dz(z: np.ndarray | float, t: float) -> np.ndarray | float:
    return -np.asarray(z) / (2.0 * t) * gamma_1(z, t)


def gamma_1_dzz(z: np.ndarray | float, t: float) -> np.ndarray | float:
    return (np.square(z) / (4.0 * t**2) - 1.0 / (2.0 * t)) * gamma_1(z, t)


def gamma_1_dzzz(z: np.ndarray | float, t: float) -> np.ndarray | float:
    z = np.asarray(z)
    return (3.0 * z / (4.0 * t**2) - z**3 / (8.0 * t**3)) * gamma_1(z, t)


_DERIVATIVES = (gamma_1, gamma_1_dz, gamma_1_dzz, gamma_1_dzzz)


def _sphere_area(m: int) -> float:
    return 2.0 * math.pi ** (m / 2.0) / float(gamma_function(m / 2.0))


def horizontal_kernel_l1(n: int, t: float, m: int) -> float:
    """Integral over R^m of |grad'^n Gamma_m|, n in {0, 1, 2}, by radial quadrature."""

    def radial(r: float) -> float:
        g = t ** (-m / 2.0) * math.exp(-(r**2) / (4.0 * t))
        g_r = -r / (2.0 * t) * g
        match n:
            case 0:
                value = g
            case 1:
                value = abs(g_r)
            case _:
                g_rr = (r**2 / (4.0 * t**2) - 1.0 / (2.0 * t)) * g
                tangential = (m - 1) * (g_r / r) ** 2 if r > 0.0 else (m - 1) * (1.0 / (2.0 * t) * g) ** 2
                value = math.sqrt(g_rr**2 + tangential)
        return value * r ** (m - 1)

    scale = math.sqrt(t)
    points = [math.sqrt(2.0 * t)] if n == 2 else None
    head, _ = quad(radial, 0.0, 12.0 * scale, points=points, limit=200)
    tail, _ = quad(radial, 12.0 * scale, math.inf, limit=200)
    return _sphere_area(m) * (head + tail)


def vertical_kernel_l1(n: int, t: float) -> float:
    """Integral over R of |d_z^n Gamma_1|."""
    derivative = _DERIVATIVES[n]
    scale = math.sqrt(t)
    head, _ = quad(lambda z: abs(float(derivative(z, t))), 0.0, 12.0 * scale, limit=200)
    tail, _ = quad(lambda z: abs(float(derivative(z, t))), 12.0 * scale, math.inf, limit=200)
    return 2.0 * (head + tail)


def _sup_positive(function: Callable[[float], float], upper: float) -> float:
    grid = np.linspace(0.0, upper, 2001)
    values = np.array([function(float(x)) for x in grid])
    best = int(np.argmax(values))
    low, high = grid[max(best - 1, 0)], grid[min(best + 1, len(grid) - 1)]
    refined = minimize_scalar(lambda x: -function(float(x)), bounds=(low, high), method="bounded")
    return max(float(values[best]), float(-refined.fun))


def time_integral_dz(z: float) -> float:
    """Integral over t in (0, inf) of |d_z Gamma_1(z, t)|."""
    head, _ = quad(lambda t: abs(float(gamma_1_dz(z, t))), 0.0, z**2, limit=200)
    tail, _ = quad(lambda t: abs(float(gamma_1_dz(z, t))), z**2, math.inf, limit=200)
    return head + tail


def rescaled_time_integral() -> float:
    """Integral over s in (0, inf) of s^{-3/2} exp(-1/(4s))."""
    head, _ = quad(lambda s: s**-1.5 * math.exp(-1.0 / (4.0 * s)), 0.0, 1.0, limit=200)
    tail, _ = quad(lambda s: s**-1.5 * math.exp(-1.0 / (4.0 * s)), 1.0, math.inf, limit=200)
    return head + tail


class KernelBoundResult(BaseFrozen):
    lhs: float
    rhs: float
    ratio: float
    z_tilde_star: float


def reflected_kernel(K: Kernel, z: np.ndarray | float, z_tilde: float) -> np.ndarray | float:
    """(z~/z) |K(z~ - z) - K(z~ + z)|."""
    return z_tilde / np.asarray(z) * np.abs(np.asarray(K(z_tilde - np.asarray(z))) - np.asarray(K(z_tilde + np.asarray(z))))


def kernel_bound_check(K: Kernel, dK: Kernel, scale: float = 1.0, samples: int = 48) -> KernelBoundResult:
    """LHS sup_{z~} int_0^inf Kbar dz against RHS int |K| + sup z^2 |K'|, both by quadrature.

    `scale` is the length over which K varies (sqrt(t) for heat kernels).
    """
    if not scale > 0.0:
        raise ParameterError(message=f"kernel scale must be positive, got {scale}")
    reach = 40.0 * scale
    best, best_tilde = 0.0, 0.0
    for z_tilde in np.geomspace(1e-3 * scale, 20.0 * scale, samples):
        zt = float(z_tilde)
        value, _ = quad(lambda z: float(reflected_kernel(K, z, zt)), 0.0, 2.0 * zt + reach, points=[zt], limit=400)
        if value > best:
            best, best_tilde = value, zt
    mass_head, _ = quad(lambda z: abs(float(K(z))), -reach, reach, limit=400)
    moment = _sup_positive(lambda z: z**2 * max(abs(float(dK(z))), abs(float(dK(-z)))), reach)
    rhs = mass_head + moment
    return KernelBoundResult(lhs=float(best), rhs=float(rhs), ratio=float(best / rhs), z_tilde_star=best_tilde)


class KernelEstimateReport(BaseFrozen):
    """Scaled kernel quantities per sampled t (or z for the time integral) and their maxima."""

    t_samples: list[float]
    z_samples: list[float]
    horizontal_dimension: int
    constants: dict[str, list[float]]

    @property
    def maxima(self) -> dict[str, float]:
        return {name: float(max(values)) for name, values in self.constants.items()}

    @property
    def variation(self) -> dict[str, float]:
        """Largest relative spread of each quantity over its samples."""
        spread = {}
        for name, values in self.constants.items():
            array = np.asarray(values)
            reference = max(float(np.max(np.abs(array))), 1e-300)
            spread[name] = float((np.max(array) - np.min(array)) / reference)
        return spread

    def to_json(self) -> Dict[str, Any]:
        return {
            "t_samples": list(self.t_samples),
            "z_samples": list(self.z_samples),
            "horizontal_dimension": self.horizontal_dimension,
            "constants": {name: list(values) for name, values in self.constants.items()},
            "maxima": self.maxima,
            "variation": self.variation,
        }


def heat_kernel_estimates(
    t_samples: Sequence[float], z_samples: Sequence[float], horizontal_dimension: int = 1
) -> KernelEstimateReport:
    """Samples every scaled heat-kernel quantity.

    z0_n = t^{n/2} int |grad'^n Gamma_m| dx', x1_n = t^{n/2} int |d_z^n Gamma_1| dz,
    y1 = z int_0^inf |d_z Gamma_1| dt (and its rescaled integral), y2 = t^{1/2} sup z |d_z Gamma_1|,
    y3 = sup z^2 |d_z Gamma_1| / 4, i.e. sup xi^3 exp(-xi^2) in xi = z/(2 sqrt t), and the
    reflected-kernel ratios for Gamma_1 and d_z Gamma_1.
    """
    times = [float(t) for t in t_samples]
    if not times or any(not T_RANGE[0] <= t <= T_RANGE[1] for t in times):
        raise ParameterError(message=f"t samples must be non-empty and inside [{T_RANGE[0]:g}, {T_RANGE[1]:g}]")
    heights = [float(z) for z in z_samples]
    if not heights or any(z <= 0.0 for z in heights):
        raise ParameterError(message="z samples must be non-empty and positive")

    constants: dict[str, list[float]] = {f"z0_{n}": [] for n in range(3)}
    constants.update({f"x1_{n}": [] for n in range(3)})
    constants.update({"y2": [], "y3": [], "ee1_gamma": [], "ee1_dz_gamma": []})
    for t in times:
        root = math.sqrt(t)
        for n in range(3):
            constants[f"z0_{n}"].append(t ** (n / 2.0) * horizontal_kernel_l1(n, t, horizontal_dimension))
            constants[f"x1_{n}"].append(t ** (n / 2.0) * vertical_kernel_l1(n, t))
        constants["y2"].append(root * _sup_positive(lambda z: z * abs(float(gamma_1_dz(z, t))), 12.0 * root))
        constants["y3"].append(_sup_positive(lambda z: z**2 * abs(float(gamma_1_dz(z, t))), 12.0 * root) / 4.0)
        constants["ee1_gamma"].append(
            kernel_bound_check(lambda z: gamma_1(z, t), lambda z: gamma_1_dz(z, t), root).ratio
        )
        constants["ee1_dz_gamma"].append(
            kernel_bound_check(lambda z: gamma_1_dz(z, t), lambda z: gamma_1_dzz(z, t), root).ratio
        )
    constants["y1"] = [z * time_integral_dz(z) for z in heights]
    constants["y1_rescaled"] = [rescaled_time_integral()]
    return KernelEstimateReport(
        t_samples=times, z_samples=heights, horizontal_dimension=int(horizontal_dimension), constants=constants
    )


def heat_duhamel_reference(
    forcing: Callable[[np.ndarray, np.ndarray], np.ndarray],
    kappa: float,
    z_points: Sequence[float],
    t: float,
    order: int = 48,
) -> np.ndarray:
    """Solution at time t of (d_t - d_z^2 + kappa^2) u = forcing(z, s) on z > 0, u(0) = 0, u(t=0) = 0.

    Uses the image kernel Gamma(z - z~) - Gamma(z + z~), i.e. the odd extension
    of the forcing, with Gauss-Hermite nodes in space and Gauss-Legendre nodes
    in sqrt(t - s).
    """
    eta, eta_weights = roots_hermite(order)
    sigma, sigma_weights = roots_legendre(order)
    root_t = math.sqrt(t)
    sigma = 0.5 * root_t * (sigma + 1.0)
    sigma_weights = 0.5 * root_t * sigma_weights
    values = []
    for z in z_points:
        lag = sigma[:, np.newaxis] ** 2
        shifted = z + 2.0 * sigma[:, np.newaxis] * eta[np.newaxis, :]
        odd = np.sign(shifted) * forcing(np.abs(shifted), t - lag)
        inner = odd @ eta_weights / math.sqrt(math.pi)
        values.append(float(np.sum(sigma_weights * 2.0 * sigma * np.exp(-(kappa**2) * sigma**2) * inner)))
    return np.asarray(values)
