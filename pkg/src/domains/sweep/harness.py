"""Ra-Pr sweep orchestration: a worker pool computes points, the parent appends rows in order."""

import json
import math
import os
import time

from multiprocessing import Pool
from pathlib import Path
from typing import Any, Dict, Iterator, Optional, Sequence

import numpy as np

from common.console import log_event, log_failure, log_warning
from common.errors import ConfigurationError, StateError
from common.loading import progress
from common.result import Err, Ok, try_catch
from domains.boussinesq.run import Trajectory, run
from domains.boussinesq.state import State
from domains.diagnostics.bounds import MIN_BOUND_RA, bound_check, energy_balance_residual
from domains.diagnostics.hardy import hardy_nonlinearity_ratio
from domains.diagnostics.nusselt import nusselt_report
from domains.sweep.fit import fit_scaling
from domains.sweep.results import (
    CSV_COLUMNS,
    CSV_SCHEMA,
    SweepResult,
    SweepRow,
    append_row,
    branch_for,
    write_header,
)
from domains.sweep.runspec import RunSpec, SimulationSettings


SUMMARY_SCHEMA = 1

Task = tuple[SimulationSettings, float, float, int]


def point_seeds(seed: int, count: int) -> list[int]:
    return [int(child.generate_state(1)[0]) for child in np.random.SeedSequence(seed).spawn(count)]


def ensure_output_dir(out: Path) -> Path:
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as error:
        raise ConfigurationError(message=f"cannot create output directory {out}: {error}") from error
    if not os.access(out, os.W_OK):
        raise ConfigurationError(message=f"output directory {out} is not writable")
    return out


def row_from_trajectory(trajectory: Trajectory, hardy_max: float, wall_clock: float) -> SweepRow:
    params, averages = trajectory.params, trajectory.averages
    if averages.is_empty:
        raise StateError(message="no samples after the transient; raise t_end or lower sample_every")
    report = nusselt_report(averages)
    t_first, t_last = averages.window
    return SweepRow(
        Ra=params.Ra,
        Pr=params.Pr,
        L=params.L,
        Nx=params.Nx,
        Nz=params.Nz,
        dt=params.dt,
        t_avg=t_last - t_first,
        nu_plane_mean=report.nu_plane_mean,
        nu_volume=report.nu_volume,
        nu_dissipation=report.nu_dissipation,
        spread=report.spread,
        energy_residual=energy_balance_residual(averages, params),
        min_T=trajectory.T_min,
        max_T=trajectory.T_max,
        hardy_max=hardy_max,
        wall_clock=wall_clock,
        branch=branch_for(params.Ra, params.Pr),
    )


def simulate_point(
    settings: SimulationSettings,
    Ra: float,
    Pr: float,
    seed: int,
    checkpoint_dir: Optional[Path] = None,
    initial: Optional[State] = None,
) -> tuple[Trajectory, SweepRow]:
    params = settings.params(Ra, Pr)
    hardy: list[float] = [0.0]
    started = time.perf_counter()
    trajectory = run(
        params,
        seed,
        settings.amplitude,
        observers=[lambda state: hardy.append(hardy_nonlinearity_ratio(state))],
        initial=initial,
        checkpoint_dir=checkpoint_dir,
    )
    return trajectory, row_from_trajectory(trajectory, max(hardy), time.perf_counter() - started)


def failed_row(settings: SimulationSettings, Ra: float, Pr: float, error: Exception) -> SweepRow:
    resolved = try_catch(lambda: settings.params(Ra, Pr))
    match resolved.inner:
        case Ok(value=params):
            L, Nx, Nz, dt = params.L, params.Nx, params.Nz, params.dt
        case Err():
            L, Nx, Nz, dt = settings.L, settings.Nx or 0, settings.Nz or 0, settings.dt or math.nan
    message = str(error) or error.__class__.__name__
    return SweepRow(
        Ra=Ra,
        Pr=Pr,
        L=L,
        Nx=Nx,
        Nz=Nz,
        dt=dt,
        branch=branch_for(Ra, Pr),
        status="failed",
        error=f"{error.__class__.__name__}: {message}",
    )


def sweep_task(task: Task) -> Dict[str, Any]:
    """Worker entry; returns a plain row dictionary, failures included."""
    settings, Ra, Pr, seed = task
    outcome = try_catch(lambda: simulate_point(settings, Ra, Pr, seed)[1])
    match outcome.inner:
        case Ok(value=row):
            return row.model_dump()
        case Err(error=error):
            return failed_row(settings, Ra, Pr, error).model_dump()


def _quiet_worker() -> None:
    os.environ["RBLAB_LOG_LEVEL"] = "quiet"


def _execute(tasks: Sequence[Task], jobs: int) -> Iterator[Dict[str, Any]]:
    if jobs <= 1:
        yield from map(sweep_task, tasks)
        return
    with Pool(processes=max(1, min(jobs, len(tasks))), initializer=_quiet_worker) as pool:
        yield from pool.imap(sweep_task, tasks)


def sweep_summary(rows: Sequence[SweepRow]) -> Dict[str, Any]:
    completed = [row for row in rows if row.ok]
    eligible = [(row.Ra, row.Pr, row.nu_volume) for row in completed if row.Ra >= MIN_BOUND_RA]
    fits: Dict[str, Any] = {}
    for Pr in sorted({row.Pr for row in completed}):
        fitted = try_catch(lambda: fit_scaling(completed, Pr=Pr))
        match fitted.inner:
            case Ok(value=fit):
                fits[f"{Pr:g}"] = fit.to_json()
            case Err(error=error):
                log_warning("sweep.fit.skipped", Pr=Pr, reason=str(error))
    return {
        "schema": SUMMARY_SCHEMA,
        "csv_schema": CSV_SCHEMA,
        "columns": list(CSV_COLUMNS),
        "points": len(rows),
        "completed": len(completed),
        "failed": [{"Ra": row.Ra, "Pr": row.Pr, "error": row.error} for row in rows if not row.ok],
        "branches": [{"Ra": row.Ra, "Pr": row.Pr, "branch": row.branch} for row in rows],
        "bound": bound_check(eligible).to_json() if eligible else None,
        "fits": fits,
    }


def run_sweep(spec: RunSpec) -> SweepResult:
    out = ensure_output_dir(spec.out_dir)
    csv_path = out / "results.csv"
    summary_path = out / "summary.json"
    write_header(csv_path)

    points = spec.sweep.points
    tasks: list[Task] = [
        (spec.simulation, ra, pr, seed) for (ra, pr), seed in zip(points, point_seeds(spec.seed, len(points)))
    ]
    log_event("sweep.start", points=len(tasks), jobs=spec.jobs, out=str(out))

    rows: list[SweepRow] = []
    # in-process runs drive their own progress bar
    bar_total = len(tasks) if spec.jobs > 1 else 0
    with progress(bar_total, "sweep points") as advance:
        for payload in _execute(tasks, spec.jobs):
            row = SweepRow(**payload)
            append_row(csv_path, row)
            rows.append(row)
            if row.ok:
                log_event("sweep.point", Ra=row.Ra, Pr=row.Pr, nu=row.nu_volume, spread=row.spread)
            else:
                log_failure("sweep.point.failed", Ra=row.Ra, Pr=row.Pr, error=row.error)
            advance(1)

    summary = sweep_summary(rows)
    summary_path.write_text(json.dumps(summary, indent=2), encoding="utf-8")
    log_event("sweep.finish", completed=summary["completed"], failed=len(summary["failed"]))
    return SweepResult(rows=rows, csv_path=str(csv_path), summary_path=str(summary_path))
