import json

from typing import Any, Dict

from rich.table import Table

from common.command.base_command import BaseCommand
from common.command.base_command_handler import BaseCommandHandler
from common.command.execute_command_handler import execute_command_handler, report
from common.console import get_console
from common.errors import CeilingExceeded
from common.response import json_response
from domains.stokes.certify import KernelCertification, certify_kernels
from domains.sweep.harness import ensure_output_dir
from domains.sweep.runspec import RunSpec


class Command(BaseCommand):
    spec: RunSpec


def _print_constants(certification: KernelCertification) -> None:
    estimates = certification.report
    table = Table(title="Heat-kernel constants")
    table.add_column("estimate")
    table.add_column("max", justify="right")
    table.add_column("t-variation", justify="right")
    for name, value in estimates.maxima.items():
        table.add_row(name, f"{value:.8g}", f"{estimates.variation[name]:.2e}")
    get_console().print(table)


class Handler(BaseCommandHandler[Command]):
    def handle_command(self, command: Command) -> tuple[Dict[str, Any], int]:
        spec = command.spec
        out = ensure_output_dir(spec.out_dir)
        certification = certify_kernels(spec.kernels)
        payload = certification.to_json()
        (out / "certify_kernels.json").write_text(json.dumps(payload, indent=2), encoding="utf-8")
        _print_constants(certification)

        if not certification.passed:
            raise CeilingExceeded(
                message=f"kernel estimates failed: worst ratio {certification.worst_ratio:.4g}, "
                f"ceiling {certification.ceiling:g}, variation limit {certification.variation_limit:g}",
                ratio=certification.worst_ratio,
                ceiling=certification.ceiling,
            )
        return json_response(payload)


def execute_certify_kernels(spec: RunSpec) -> int:
    try:
        response, status_code = execute_command_handler(Command, {"spec": spec}, Handler)
        return report(response, status_code)
    except Exception as e:
        get_console().print(f"[red]Error: {str(e)}[/red]")
        return 1
