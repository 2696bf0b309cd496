from typing import Optional

import numpy as np

from common.base import BaseFrozenArbitrary
from domains.spectral.fields import ModalField
from domains.spectral.grid import Grid


class State(BaseFrozenArbitrary):
    """Temperature, streamfunction and vorticity; u' = -d_z psi, u^z = d_x psi."""

    T: ModalField
    psi: ModalField
    omega: ModalField
    t: float = 0.0
    step_index: int = 0
    history: Optional[np.ndarray] = None

    @property
    def grid(self) -> Grid:
        return self.T.grid

    @property
    def theta(self) -> np.ndarray:
        """Deviation from the conduction profile, zero at both walls."""
        coefficients = self.T.coefficients.copy()
        coefficients[0] -= conduction_profile(self.grid)
        return coefficients

    def velocity(self) -> tuple[np.ndarray, np.ndarray]:
        grid = self.grid
        psi = self.psi.coefficients
        horizontal = -(psi @ grid.dz_matrix.T)
        vertical = 1j * grid.k_values[:, np.newaxis] * psi
        vertical[grid.nyquist_index] = 0.0
        return horizontal, vertical


def conduction_profile(grid: Grid) -> np.ndarray:
    return 1.0 - grid.z_nodes / grid.height
