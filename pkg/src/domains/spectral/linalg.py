import numpy as np

from scipy.linalg import lu_solve


LUFactor = tuple[np.ndarray, np.ndarray]


def dirichlet_rows(matrix: np.ndarray) -> np.ndarray:
    """Copy of `matrix` whose first and last rows impose the end values."""
    bordered = matrix.copy()
    bordered[0, :] = 0.0
    bordered[-1, :] = 0.0
    bordered[0, 0] = 1.0
    bordered[-1, -1] = 1.0
    return bordered


def solve_real(factor: LUFactor, rhs: np.ndarray) -> np.ndarray:
    """Solves a real factored system for a complex right-hand side of shape (n,) or (n, m)."""
    if rhs.ndim == 1:
        solution = lu_solve(factor, np.column_stack([rhs.real, rhs.imag]))
        return solution[:, 0] + 1j * solution[:, 1]
    half = rhs.shape[1]
    solution = lu_solve(factor, np.concatenate([rhs.real, rhs.imag], axis=-1))
    return solution[:, :half] + 1j * solution[:, half:]


def solve_batched(factor: LUFactor, rhs: np.ndarray) -> np.ndarray:
    """Solves along the last axis for every leading index of `rhs`."""
    n = rhs.shape[-1]
    columns = np.asarray(rhs, dtype=complex).reshape(-1, n).T
    return solve_real(factor, columns).T.reshape(rhs.shape)
