import math

from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from common.base import BaseFrozenArbitrary
from common.console import log_debug, log_event
from common.errors import LabError, SimulationFailure
from common.loading import progress
from domains.boussinesq.checkpoint import save_checkpoint
from domains.boussinesq.params import SimParams
from domains.boussinesq.solver import courant_number, init_state, step
from domains.boussinesq.state import State
from domains.diagnostics.averages import TimeAverages, plateau_reached, sample_profiles
from domains.spectral.transforms import integrate_vertical, to_physical


Observer = Callable[[State], None]

SUBSTEP_TARGET = 0.8


class Trajectory(BaseFrozenArbitrary):
    """Sample times, instantaneous Nusselt series and the post-transient averages of one run."""

    params: SimParams
    times: np.ndarray
    nu_series: np.ndarray
    averages: TimeAverages
    final_state: State
    T_min: float
    T_max: float
    snapshots: list[State] = []

    @property
    def plateau(self) -> bool:
        return plateau_reached(self.nu_series)


def instantaneous_nusselt(state: State) -> float:
    sample = sample_profiles(state)
    return integrate_vertical(sample.flux - sample.dz_T, state.grid) / state.grid.height


def advance(state: State, params: SimParams) -> State:
    """One step of params.dt, split into equal substeps while the flow is too fast for a single one.

    Substeps start and end without Adams-Bashforth history, so the next full
    step restarts with forward Euler.
    """
    target = SUBSTEP_TARGET * params.cfl_limit
    courant = courant_number(state, params.dt)
    if courant <= target:
        return step(state, params)
    pieces = int(math.ceil(courant / target))
    fine = params.model_copy(update={"dt": params.dt / pieces})
    log_debug("run.substep", t=state.t, courant=courant, pieces=pieces)
    current = state.model_copy(update={"history": None})
    for _ in range(pieces):
        current = step(current, fine)
    return current.model_copy(update={"t": state.t + params.dt, "step_index": state.step_index + 1, "history": None})


def _extrema(state: State, low: float, high: float) -> tuple[float, float]:
    T = to_physical(state.T.coefficients, state.grid)
    return min(low, float(T.min())), max(high, float(T.max()))


def run(
    params: SimParams,
    seed: int,
    amplitude: float,
    observers: Sequence[Observer] = (),
    store_snapshots: bool = False,
    initial: Optional[State] = None,
    checkpoint_dir: Optional[Path] = None,
) -> Trajectory:
    """Integrates to t_end, averaging every `sample_every` steps once the transient is over."""
    state = initial if initial is not None else init_state(params, seed, amplitude)
    averages = TimeAverages.empty(params.grid)
    times: list[float] = []
    nus: list[float] = []
    snapshots: list[State] = []
    T_min, T_max = _extrema(state, np.inf, -np.inf)

    log_event("run.start", Ra=params.Ra, Pr=params.Pr, Nx=params.Nx, Nz=params.Nz, dt=params.dt, steps=params.n_steps)
    with progress(params.n_steps, f"Ra={params.Ra:.3g} Pr={params.Pr:.3g}") as tick:
        for n in range(params.n_steps):
            try:
                state = advance(state, params)
            except LabError as error:
                raise SimulationFailure(
                    message=f"{error.__class__.__name__} during step {n + 1}", time=state.t + params.dt, cause=str(error)
                ) from error
            tick(1)
            T_min, T_max = _extrema(state, T_min, T_max)

            if params.checkpoint_every and checkpoint_dir is not None and state.step_index % params.checkpoint_every == 0:
                save_checkpoint(checkpoint_dir / f"step_{state.step_index:08d}.npz", state, params)

            if n + 1 <= params.transient_steps or (n + 1 - params.transient_steps) % params.sample_every:
                continue
            averages = averages.add(sample_profiles(state))
            times.append(state.t)
            nus.append(instantaneous_nusselt(state))
            for observer in observers:
                observer(state)
            if store_snapshots:
                snapshots.append(state)
            log_debug("run.sample", t=state.t, nu=nus[-1])

    if nus:
        log_event("run.finish", t=state.t, samples=len(nus), nu=float(np.mean(nus)))
    else:
        log_event("run.finish", t=state.t, samples=0)
    return Trajectory(
        params=params,
        times=np.asarray(times, dtype=float),
        nu_series=np.asarray(nus, dtype=float),
        averages=averages,
        final_state=state,
        T_min=float(T_min),
        T_max=float(T_max),
        snapshots=snapshots,
    )
