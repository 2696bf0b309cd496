from typing import Any, Callable, Dict, Type, TypeVar, assert_never

from common.command.base_command import BaseCommand
from common.command.base_command_handler import BaseCommandHandler
from common.console import get_console
from common.json_parser import try_parse_json
from common.response import STATUS_INVALID, STATUS_OK, exit_code, to_response
from common.result import Err, Ok


C = TypeVar("C", bound=BaseCommand)


def execute_command_handler(
    command_type: Type[C], request_data: Dict[str, Any], command_handler: Callable[[], BaseCommandHandler[C]]
) -> tuple[Dict[str, Any], int]:
    rcommand = try_parse_json(command_type, request_data)
    match rcommand.inner:
        case Err(error=error):
            return {"error": {"message": f"Invalid command: {error}"}}, STATUS_INVALID
        case Ok(value=value):
            command = value
        case _:
            assert_never(rcommand)

    try:
        return command_handler().handle_command(command)
    except Exception as failure:
        return to_response(failure)


def report(response: Dict[str, Any], status: int) -> int:
    """Prints the error of a failed response and maps the status to an exit code."""
    if status != STATUS_OK:
        message = response.get("error", {}).get("message", "Unknown error")
        get_console().print(f"[red]{message}[/red]")
    return exit_code(status)
