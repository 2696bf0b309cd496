import json

from pathlib import Path
from typing import Any, Dict

from rich.table import Table

from common.command.base_command import BaseCommand
from common.command.base_command_handler import BaseCommandHandler
from common.command.execute_command_handler import execute_command_handler, report
from common.console import get_console
from common.response import STATUS_FAILURE, json_response
from domains.sweep.harness import run_sweep
from domains.sweep.plots import emit_plots
from domains.sweep.results import SweepResult
from domains.sweep.runspec import RunSpec


class Command(BaseCommand):
    spec: RunSpec


def _print_result(result: SweepResult) -> None:
    table = Table(title="Sweep")
    for column in ("Ra", "Pr", "Nu", "spread", "branch", "status"):
        table.add_column(column, justify="right" if column not in ("branch", "status") else "left")
    for row in result.rows:
        nu = f"{row.nu_volume:.5g}" if row.ok else "-"
        spread = f"{row.spread:.2%}" if row.ok else "-"
        table.add_row(f"{row.Ra:g}", f"{row.Pr:g}", nu, spread, row.branch or "-", row.status)
    get_console().print(table)


class Handler(BaseCommandHandler[Command]):
    def handle_command(self, command: Command) -> tuple[Dict[str, Any], int]:
        result = run_sweep(command.spec)
        _print_result(result)
        summary = json.loads(Path(result.summary_path or "").read_text(encoding="utf-8"))
        if not result.completed:
            return {"error": {"message": "every sweep point failed", "summary": summary}}, STATUS_FAILURE

        bound = summary["bound"]
        constant = bound["C"] if bound is not None else 1.0
        emit_plots(result.completed, command.spec.out_dir, constant=constant)
        return json_response(summary)


def execute_sweep(spec: RunSpec) -> int:
    try:
        response, status_code = execute_command_handler(Command, {"spec": spec}, Handler)
        return report(response, status_code)
    except Exception as e:
        get_console().print(f"[red]Error: {str(e)}[/red]")
        return 1
