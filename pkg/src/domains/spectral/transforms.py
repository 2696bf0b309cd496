"""Transforms and differential operators acting on ModalField.

Horizontal operators are diagonal multipliers in k'; vertical operators are
Chebyshev collocation matrices applied along the last axis.
"""

from typing import Literal

import numpy as np

from common.errors import SingularModeError, SymmetryError
from domains.spectral.fields import ModalField, PhysicalField
from domains.spectral.grid import Grid


FractionalPower = Literal[0.5, -0.5, 1, -1]


def forward_transform(f: PhysicalField) -> ModalField:
    grid = f.grid
    coefficients = np.fft.fft(np.asarray(f.values, dtype=float), axis=-2) / grid.Nx
    return ModalField(coefficients=coefficients, grid=grid)


def inverse_transform(f: ModalField, tolerance: float = 1e-10) -> PhysicalField:
    if not f.is_hermitian(tolerance):
        raise SymmetryError(message="coefficients are not Hermitian symmetric; field is not real")
    values = np.fft.ifft(f.coefficients * f.grid.Nx, axis=-2).real
    return PhysicalField(values=values, grid=f.grid)


def to_physical(coefficients: np.ndarray, grid: Grid) -> np.ndarray:
    """Unchecked inverse for internal use on fields known to be real."""
    return np.fft.ifft(coefficients * grid.Nx, axis=-2).real


def to_modal(values: np.ndarray, grid: Grid) -> np.ndarray:
    return np.fft.fft(values, axis=-2) / grid.Nx


def _wavenumber_column(grid: Grid) -> np.ndarray:
    return grid.k_values[:, np.newaxis]


def horizontal_derivative(f: ModalField, order: int = 1) -> ModalField:
    if order < 1:
        raise ValueError(f"order must be positive, got {order}")
    symbol = (1j * _wavenumber_column(f.grid)) ** order
    if order % 2 == 1:
        symbol[f.grid.nyquist_index] = 0.0
    return f.with_coefficients(f.coefficients * symbol)


def vertical_derivative(f: ModalField, order: int = 1) -> ModalField:
    if order < 1:
        raise ValueError(f"order must be positive, got {order}")
    operator = np.linalg.matrix_power(f.grid.dz_matrix, order)
    return f.with_coefficients(f.coefficients @ operator.T)


def fractional_laplacian_half(f: ModalField, power: FractionalPower) -> ModalField:
    """Applies (-Delta')^power, power in {1/2, -1/2, 1, -1}."""
    magnitude = np.abs(_wavenumber_column(f.grid))
    if power < 0:
        zero_mode = f.coefficients[..., 0, :]
        if np.max(np.abs(zero_mode), initial=0.0) > 1e-14 * max(1.0, f.max_abs()):
            raise SingularModeError(message="negative horizontal Laplacian power applied to a field with nonzero mean")
        symbol = np.zeros_like(magnitude)
        symbol[1:] = magnitude[1:] ** (2.0 * power)
    else:
        symbol = magnitude ** (2.0 * power)
    return f.with_coefficients(f.coefficients * symbol)


def dealias(coefficients: np.ndarray, grid: Grid) -> np.ndarray:
    """2/3-rule truncation; the Nyquist mode is always removed."""
    keep = np.abs(grid.mode_numbers) <= grid.Nx // 3
    keep[grid.nyquist_index] = False
    return coefficients * keep[:, np.newaxis]


def horizontal_average_product(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Horizontal mean of the product of two real fields via Parseval, per z."""
    return np.real(np.sum(f * np.conj(g), axis=-2))


def horizontal_mean_abs(coefficients: np.ndarray, grid: Grid) -> np.ndarray:
    return np.mean(np.abs(to_physical(coefficients, grid)), axis=-2)


def integrate_vertical(profile: np.ndarray, grid: Grid) -> float:
    return float(np.dot(profile, grid.quadrature_weights))
