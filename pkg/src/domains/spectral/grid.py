"""Horizontal Fourier / vertical Chebyshev grid shared by every field."""

from functools import lru_cache

import numpy as np

from pydantic import model_validator

from common.base import BaseFrozen
from common.errors import ConfigurationError


@lru_cache(maxsize=64)
def chebyshev_operator(n_points: int, height: float) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Lobatto nodes on [0, height] (increasing) and the collocation derivative matrix."""
    n = n_points - 1
    c = np.ones((1, n + 1))
    c[0, 0] = 2.0
    c[0, -1] = 2.0
    c *= (-1.0) ** np.arange(n + 1)

    x = np.cos(np.pi * np.arange(n + 1) / n)
    X = np.repeat(x[:, np.newaxis], n + 1, axis=-1)
    dX = X - X.T
    D = (c.T @ (1.0 / c)) / (dX + np.identity(n + 1))
    D -= np.diag(D.sum(axis=-1))

    beta = height / 2.0
    nodes = beta + beta * x[::-1]
    nodes[0], nodes[-1] = 0.0, height
    Dp = np.ascontiguousarray(D[::-1, ::-1] / beta)
    nodes.setflags(write=False)
    Dp.setflags(write=False)
    return nodes, Dp


@lru_cache(maxsize=64)
def clenshaw_curtis_weights(n_points: int, height: float) -> np.ndarray:
    n = n_points - 1
    theta = np.pi * np.arange(n + 1) / n
    w = np.zeros(n + 1)
    interior = np.arange(1, n)
    v = np.ones(n - 1)
    if n % 2 == 0:
        w[0] = w[n] = 1.0 / (n**2 - 1)
        for k in range(1, n // 2):
            v -= 2.0 * np.cos(2 * k * theta[interior]) / (4 * k * k - 1)
        v -= np.cos(n * theta[interior]) / (n**2 - 1)
    else:
        w[0] = w[n] = 1.0 / n**2
        for k in range(1, (n - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * k * theta[interior]) / (4 * k * k - 1)
    w[interior] = 2.0 * v / n
    weights = w[::-1] * (height / 2.0)
    weights.setflags(write=False)
    return weights


class Grid(BaseFrozen):
    L: float
    Nx: int
    Nz: int
    height: float = 1.0

    @model_validator(mode="after")
    def _check_resolution(self) -> "Grid":
        if self.L <= 0.0 or self.height <= 0.0:
            raise ConfigurationError(message="L and height must be positive")
        if self.Nx < 2 or self.Nx % 2 != 0:
            raise ConfigurationError(message=f"Nx must be even and positive, got {self.Nx}")
        if self.Nz < 4:
            raise ConfigurationError(message=f"Nz must be at least 4, got {self.Nz}")
        return self

    @property
    def z_nodes(self) -> np.ndarray:
        return chebyshev_operator(self.Nz, self.height)[0]

    @property
    def dz_matrix(self) -> np.ndarray:
        return chebyshev_operator(self.Nz, self.height)[1]

    @property
    def quadrature_weights(self) -> np.ndarray:
        return clenshaw_curtis_weights(self.Nz, self.height)

    @property
    def x_nodes(self) -> np.ndarray:
        return np.arange(self.Nx) * (self.L / self.Nx)

    @property
    def k_values(self) -> np.ndarray:
        """Wavenumbers in FFT storage order; index n holds 2*pi*n/L for n < Nx/2."""
        return np.fft.fftfreq(self.Nx, d=self.L / self.Nx) * 2.0 * np.pi

    @property
    def mode_numbers(self) -> np.ndarray:
        return np.fft.fftfreq(self.Nx, d=1.0 / self.Nx).round().astype(int)

    @property
    def nyquist_index(self) -> int:
        return self.Nx // 2

    def mode_index(self, n: int) -> int:
        """Storage index of horizontal mode number n."""
        if not -self.Nx // 2 <= n < self.Nx // 2:
            raise IndexError(f"mode {n} outside [-{self.Nx // 2}, {self.Nx // 2})")
        return n % self.Nx

    def with_height(self, height: float) -> "Grid":
        return self.model_copy(update={"height": float(height)})
