import os

from datetime import datetime
from typing import Literal

from rich.console import Console


LogLevel = Literal["quiet", "info", "debug"]

_console: Console | None = None


def get_console() -> Console:
    global _console
    if _console is None:
        _console = Console(highlight=False)
    return _console


def log_level() -> LogLevel:
    match os.getenv("RBLAB_LOG_LEVEL", "info").strip().lower():
        case "quiet":
            return "quiet"
        case "debug":
            return "debug"
        case _:
            return "info"


def _format_value(value: object) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _emit(style: str, event: str, fields: dict[str, object]) -> None:
    stamp = datetime.now().strftime("%H:%M:%S")
    body = " ".join(f"[cyan]{key}[/cyan]={_format_value(value)}" for key, value in fields.items())
    get_console().print(f"[dim]{stamp}[/dim] [{style}]{event}[/{style}] {body}".rstrip())


def log_event(event: str, **fields: object) -> None:
    if log_level() != "quiet":
        _emit("bold", event, fields)


def log_debug(event: str, **fields: object) -> None:
    if log_level() == "debug":
        _emit("dim", event, fields)


def log_warning(event: str, **fields: object) -> None:
    if log_level() != "quiet":
        _emit("yellow", event, fields)


def log_failure(event: str, **fields: object) -> None:
    _emit("red", event, fields)
