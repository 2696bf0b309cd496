import numpy as np

from pydantic import model_validator

from common.base import BaseFrozenArbitrary
from common.errors import ConfigurationError
from domains.spectral.grid import Grid


def _check_trailing_shape(array: np.ndarray, grid: Grid, what: str) -> None:
    if array.ndim < 2 or array.shape[-2:] != (grid.Nx, grid.Nz):
        raise ConfigurationError(message=f"{what} shape {array.shape} does not end with ({grid.Nx}, {grid.Nz})")


class PhysicalField(BaseFrozenArbitrary):
    """Real samples on the Nx x Nz grid; leading axes (time, component) are allowed."""

    values: np.ndarray
    grid: Grid

    @model_validator(mode="after")
    def _check_shape(self) -> "PhysicalField":
        _check_trailing_shape(self.values, self.grid, "values")
        return self


class ModalField(BaseFrozenArbitrary):
    """Horizontal Fourier coefficients per z-node, in FFT storage order along axis -2."""

    coefficients: np.ndarray
    grid: Grid

    @model_validator(mode="after")
    def _check_shape(self) -> "ModalField":
        _check_trailing_shape(self.coefficients, self.grid, "coefficients")
        return self

    @staticmethod
    def zeros(grid: Grid, leading: tuple[int, ...] = ()) -> "ModalField":
        return ModalField(coefficients=np.zeros(leading + (grid.Nx, grid.Nz), dtype=complex), grid=grid)

    @property
    def leading_shape(self) -> tuple[int, ...]:
        return tuple(self.coefficients.shape[:-2])

    def with_coefficients(self, coefficients: np.ndarray) -> "ModalField":
        return ModalField(coefficients=np.asarray(coefficients, dtype=complex), grid=self.grid)

    def plus(self, other: "ModalField") -> "ModalField":
        return self.with_coefficients(self.coefficients + other.coefficients)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coefficients))) if self.coefficients.size else 0.0

    def is_hermitian(self, tolerance: float = 1e-10) -> bool:
        mirrored = np.roll(self.coefficients[..., ::-1, :], 1, axis=-2)
        scale = max(1.0, self.max_abs())
        return bool(np.max(np.abs(self.coefficients - np.conj(mirrored)), initial=0.0) <= tolerance * scale)
