import json

from pathlib import Path
from typing import Any, Dict, Optional

from rich.table import Table

from common.command.base_command import BaseCommand
from common.command.base_command_handler import BaseCommandHandler
from common.command.execute_command_handler import execute_command_handler, report
from common.console import get_console, log_warning
from common.response import json_response
from common.result import Err, Ok
from domains.boussinesq.checkpoint import load_checkpoint
from domains.boussinesq.state import State
from domains.diagnostics.nusselt import nusselt_report
from domains.sweep.harness import ensure_output_dir, simulate_point
from domains.sweep.results import SweepRow, append_row, write_header
from domains.sweep.runspec import RunSpec, SimulationSettings


MAX_PRINCIPLE_SLACK = 1e-6


class Command(BaseCommand):
    spec: RunSpec
    resume: Optional[str] = None


def _resume_from(path: Path, settings: SimulationSettings) -> tuple[State, SimulationSettings]:
    loaded = load_checkpoint(path)
    match loaded.inner:
        case Err(error=error):
            raise error
        case Ok(value=(state, params)):
            update = {"Ra": params.Ra, "Pr": params.Pr, "L": params.L, "Nx": params.Nx, "Nz": params.Nz}
            return state, settings.model_copy(update={**update, "dt": params.dt})


def _print_row(row: SweepRow, plateau: bool) -> None:
    table = Table(title=f"Ra={row.Ra:g} Pr={row.Pr:g}")
    table.add_column("quantity")
    table.add_column("value", justify="right")
    for name in ("nu_plane_mean", "nu_volume", "nu_dissipation", "spread", "energy_residual", "min_T", "max_T"):
        table.add_row(name, f"{getattr(row, name):.6g}")
    table.add_row("hardy_max", f"{row.hardy_max:.4g}")
    table.add_row("plateau", "yes" if plateau else "no")
    get_console().print(table)


class Handler(BaseCommandHandler[Command]):
    def handle_command(self, command: Command) -> tuple[Dict[str, Any], int]:
        spec = command.spec
        out = ensure_output_dir(spec.out_dir)
        settings, initial = spec.simulation, None
        if command.resume is not None:
            initial, settings = _resume_from(Path(command.resume), settings)
        checkpoint_dir = out / "checkpoints" if settings.checkpoint_every else None

        trajectory, row = simulate_point(
            settings, settings.Ra, settings.Pr, spec.seed, checkpoint_dir=checkpoint_dir, initial=initial
        )
        csv_path = out / "results.csv"
        write_header(csv_path)
        append_row(csv_path, row)

        if not trajectory.plateau:
            log_warning("simulate.no_plateau", samples=len(trajectory.nu_series))
        within_bounds = row.min_T >= -MAX_PRINCIPLE_SLACK and row.max_T <= 1.0 + MAX_PRINCIPLE_SLACK
        if not within_bounds:
            log_warning("simulate.max_principle", min_T=row.min_T, max_T=row.max_T)

        summary = {
            "schema": 1,
            "row": row.record(),
            "nusselt": nusselt_report(trajectory.averages).to_json(),
            "plateau": trajectory.plateau,
            "max_principle": within_bounds,
            "final_time": trajectory.final_state.t,
        }
        (out / "summary.json").write_text(json.dumps(summary, indent=2), encoding="utf-8")
        _print_row(row, trajectory.plateau)
        return json_response(summary)


def execute_simulate(spec: RunSpec, resume: Optional[str] = None) -> int:
    try:
        response, status_code = execute_command_handler(Command, {"spec": spec, "resume": resume}, Handler)
        return report(response, status_code)
    except Exception as e:
        get_console().print(f"[red]Error: {str(e)}[/red]")
        return 1
