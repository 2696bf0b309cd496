from contextlib import contextmanager
from typing import Callable, Generator

from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn, TimeElapsedColumn

from common.console import get_console, log_level


@contextmanager
def spinner(message: str, spinner_style: str = "dots") -> Generator[None, None, None]:
    if log_level() == "quiet":
        yield
        return
    console = get_console()
    with console.status(message, spinner=spinner_style):
        yield


@contextmanager
def progress(total: int, description: str) -> Generator[Callable[[int], None], None, None]:
    """Yields an `advance(n)` callback driving a rich progress bar."""
    if log_level() == "quiet" or total <= 0:
        yield lambda _: None
        return
    bar = Progress(
        TextColumn("[bold]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        TimeElapsedColumn(),
        console=get_console(),
        transient=True,
    )
    with bar:
        task = bar.add_task(description, total=total)
        yield lambda n: bar.advance(task, n)
