import json

from typing import Any, Dict

from common.command.base_command import BaseCommand
from common.command.base_command_handler import BaseCommandHandler
from common.command.execute_command_handler import execute_command_handler, report
from common.console import get_console
from common.errors import CeilingExceeded
from common.response import json_response
from domains.stokes.certify import certify_stokes
from domains.sweep.harness import ensure_output_dir
from domains.sweep.runspec import RunSpec


class Command(BaseCommand):
    spec: RunSpec


class Handler(BaseCommandHandler[Command]):
    def handle_command(self, command: Command) -> tuple[Dict[str, Any], int]:
        spec = command.spec
        out = ensure_output_dir(spec.out_dir)
        certification = certify_stokes(spec.stokes, spec.seed)
        payload = certification.to_json()
        (out / "certify_stokes.json").write_text(json.dumps(payload, indent=2), encoding="utf-8")

        if not certification.passed:
            raise CeilingExceeded(
                message=f"max-regularity ratio {certification.max_ratio:.4g} exceeds ceiling {certification.ceiling:g}",
                ratio=certification.max_ratio,
                ceiling=certification.ceiling,
            )
        get_console().print(
            f"[green]Max-regularity ratio {certification.max_ratio:.4g} within ceiling {certification.ceiling:g}[/green]"
        )
        return json_response(payload)


def execute_certify_stokes(spec: RunSpec) -> int:
    try:
        response, status_code = execute_command_handler(Command, {"spec": spec}, Handler)
        return report(response, status_code)
    except Exception as e:
        get_console().print(f"[red]Error: {str(e)}[/red]")
        return 1
