import json

from typing import Any, Dict

from common.command.base_command import BaseCommand
from common.command.base_command_handler import BaseCommandHandler
from common.command.execute_command_handler import execute_command_handler, report
from common.console import get_console, log_event
from common.loading import spinner
from common.response import json_response
from domains.boussinesq.params import SimParams
from domains.boussinesq.stability import critical_rayleigh
from domains.sweep.harness import ensure_output_dir
from domains.sweep.runspec import RunSpec


class Command(BaseCommand):
    spec: RunSpec


class Handler(BaseCommandHandler[Command]):
    def handle_command(self, command: Command) -> tuple[Dict[str, Any], int]:
        spec = command.spec
        scan = spec.stability
        params = SimParams(Ra=scan.ra_low, Pr=spec.simulation.Pr, L=spec.simulation.L, Nz=scan.Nz)
        out = ensure_output_dir(spec.out_dir)

        with spinner(f"Bracketing onset in Ra [{scan.ra_low:g}, {scan.ra_high:g}]"):
            point = critical_rayleigh(params, scan.ra_low, scan.ra_high, (scan.k_min, scan.k_max))

        payload = {
            "Ra_c": point.Ra,
            "k_c": point.k,
            "Pr": params.Pr,
            "Nz": scan.Nz,
            "bracket": [scan.ra_low, scan.ra_high],
        }
        (out / "stability.json").write_text(json.dumps(payload, indent=2), encoding="utf-8")
        log_event("stability.onset", Ra_c=point.Ra, k_c=point.k)
        get_console().print(f"[green]Onset at Ra_c = {point.Ra:.4f}, k_c = {point.k:.4f}[/green]")
        return json_response(payload)


def execute_stability_scan(spec: RunSpec) -> int:
    try:
        response, status_code = execute_command_handler(Command, {"spec": spec}, Handler)
        return report(response, status_code)
    except Exception as e:
        get_console().print(f"[red]Error: {str(e)}[/red]")
        return 1
