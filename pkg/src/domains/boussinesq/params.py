import math

from pydantic import model_validator
from scipy.fft import next_fast_len

from common.base import BaseFrozen
from common.errors import ParameterError
from domains.spectral.grid import Grid


class SimParams(BaseFrozen):
    """Non-dimensional control parameters; time is measured in thermal diffusion units."""

    Ra: float
    Pr: float
    L: float = 2.0
    Nx: int = 64
    Nz: int = 33
    dt: float = 1e-4
    t_end: float = 1.0
    transient_fraction: float = 0.3
    cfl_limit: float = 0.5
    sample_every: int = 10
    checkpoint_every: int = 0

    @model_validator(mode="after")
    def _check_ranges(self) -> "SimParams":
        if not self.Ra > 0.0 or math.isinf(self.Ra):
            raise ParameterError(message=f"Ra must be positive and finite, got {self.Ra}")
        if not self.Pr > 0.0:
            raise ParameterError(message=f"Pr must be positive or inf, got {self.Pr}")
        if not 0.0 <= self.transient_fraction < 1.0:
            raise ParameterError(message=f"transient_fraction must lie in [0, 1), got {self.transient_fraction}")
        if not self.dt > 0.0 or self.t_end < 0.0:
            raise ParameterError(message="dt must be positive and t_end non-negative")
        if self.sample_every < 1 or self.checkpoint_every < 0:
            raise ParameterError(message="sample_every must be >= 1 and checkpoint_every >= 0")
        return self

    @property
    def infinite_prandtl(self) -> bool:
        return math.isinf(self.Pr)

    @property
    def inverse_pr(self) -> float:
        return 0.0 if self.infinite_prandtl else 1.0 / self.Pr

    @property
    def grid(self) -> Grid:
        return Grid(L=self.L, Nx=self.Nx, Nz=self.Nz)

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    @property
    def transient_steps(self) -> int:
        return int(math.floor(self.transient_fraction * self.n_steps))


def auto_resolution(Ra: float) -> tuple[int, int]:
    """Nx = max(64, 4 Ra^0.3) rounded up to an even FFT-friendly size; Nz tracks Nx/2."""
    target = max(64, int(math.ceil(4.0 * Ra**0.3)))
    nx = next_fast_len(target)
    while nx % 2:
        nx = next_fast_len(nx + 1)
    return nx, nx // 2 + 1


def auto_time_step(Ra: float, Pr: float, L: float, Nx: int, Nz: int, cfl: float = 0.35) -> float:
    """Step from the free-fall velocity estimate sqrt(Ra * min(Pr, 1)) in thermal units.

    Both velocity components are charged at that speed, horizontally against
    L/Nx and vertically against the mid-layer Chebyshev spacing.
    """
    velocity = max(1.0, 0.5 * math.sqrt(Ra * min(Pr, 1.0)))
    dz_mid = math.sin(0.5 * math.pi / (Nz - 1))
    return cfl / (velocity * Nx / L + velocity / dz_mid)
