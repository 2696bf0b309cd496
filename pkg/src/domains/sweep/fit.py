import math

from typing import Any, Dict, Iterable, Optional

import numpy as np

from scipy.stats import linregress
from scipy.stats import t as student_t

from common.base import BaseFrozen
from common.errors import FitError
from domains.sweep.results import SweepRow


MIN_POINTS = 3
MIN_DECADES = 1.5


class ScalingFit(BaseFrozen):
    """Nu = prefactor * Ra^exponent, plus the slope against Ra ln Ra."""

    Pr: float
    points: int
    exponent: float
    prefactor: float
    confidence: float
    log_exponent: float
    log_prefactor: float

    def to_json(self) -> Dict[str, Any]:
        return self.model_dump()


def _select(rows: Iterable[SweepRow], Pr: Optional[float]) -> tuple[float, list[SweepRow]]:
    completed = [row for row in rows if row.ok]
    prandtls = sorted({row.Pr for row in completed})
    if Pr is None:
        if len(prandtls) != 1:
            raise FitError(message=f"fit needs a single Pr, found {prandtls}; pass Pr explicitly")
        Pr = prandtls[0]
    return Pr, [row for row in completed if row.Pr == Pr]


def fit_scaling(rows: Iterable[SweepRow], Pr: Optional[float] = None) -> ScalingFit:
    """Least-squares slope of log Nu against log Ra at fixed Pr; `confidence` is the 95% half-width."""
    Pr, selected = _select(rows, Pr)
    if len(selected) < MIN_POINTS:
        raise FitError(message=f"fit needs at least {MIN_POINTS} completed points at Pr={Pr:g}, got {len(selected)}")

    ra = np.array([row.Ra for row in selected])
    nu = np.array([row.nu_volume for row in selected])
    if np.any(nu <= 0.0):
        raise FitError(message="Nusselt numbers must be positive to fit a power law")
    decades = math.log10(float(ra.max() / ra.min()))
    if decades < MIN_DECADES:
        raise FitError(message=f"Ra spans {decades:.2f} decades, at least {MIN_DECADES} are needed")

    plain = linregress(np.log(ra), np.log(nu))
    against_log = linregress(np.log(ra * np.log(ra)), np.log(nu))
    quantile = float(student_t.ppf(0.975, len(selected) - 2))
    return ScalingFit(
        Pr=float(Pr),
        points=len(selected),
        exponent=float(plain.slope),
        prefactor=float(math.exp(plain.intercept)),
        confidence=quantile * float(plain.stderr),
        log_exponent=float(against_log.slope),
        log_prefactor=float(math.exp(against_log.intercept)),
    )
