from common.base import BaseFrozen
from common.errors import DomainError


class PhysicalParameters(BaseFrozen):
    """Dimensional fluid layer: viscosity nu, gravity g, expansion alpha, diffusivity chi, depth h."""

    nu: float
    g: float
    alpha: float
    chi: float
    h: float
    T_bottom: float
    T_top: float


def dimensional_to_nondimensional(physical: PhysicalParameters) -> tuple[float, float]:
    """(Ra, Pr) = (g alpha (T_bottom - T_top) h^3 / (nu chi), nu / chi)."""
    positive = {"nu": physical.nu, "g": physical.g, "alpha": physical.alpha, "chi": physical.chi, "h": physical.h}
    for name, value in positive.items():
        if not value > 0.0:
            raise DomainError(message=f"{name} must be positive, got {value}")
    if not physical.T_bottom > physical.T_top:
        raise DomainError(message=f"T_bottom must exceed T_top, got {physical.T_bottom} <= {physical.T_top}")

    delta_T = physical.T_bottom - physical.T_top
    Ra = physical.g * physical.alpha * delta_T * physical.h**3 / (physical.nu * physical.chi)
    return Ra, physical.nu / physical.chi
