#!/usr/bin/env python3

import sys

from pathlib import Path
from typing import List, Optional

from dotenv import load_dotenv
from rich.console import Console

from common.arguments import CommandType, ParsedArgs, create_parser
from common.base import BaseFrozen
from common.config import error_to_message as environment_error_message
from common.config import read_environment
from common.result import Err, Ok, Result
from domains.boussinesq.command.simulate import execute_simulate
from domains.boussinesq.command.stability_scan import execute_stability_scan
from domains.stokes.command.certify_kernels import execute_certify_kernels
from domains.stokes.command.certify_stokes import execute_certify_stokes
from domains.sweep.command.sweep import execute_sweep
from domains.sweep.runspec import (
    Mode,
    Overrides,
    RunSpec,
    apply_overrides,
    load_config,
    parse_config,
)
from domains.sweep.runspec import error_to_message as config_error_message


EXIT_USAGE = 2


class AppError(BaseFrozen):
    message: str
    exit_code: int = 1


def error_to_message(error: AppError) -> str:
    return f"Error: {error.message}"


def initialize() -> None:
    """Load environment variables."""
    load_dotenv()


def resolve_spec(mode: Mode, parsed: ParsedArgs) -> Result[AppError, RunSpec]:
    """Config file, then environment, then command-line flags."""
    loaded = load_config(Path(parsed.config)) if parsed.config else parse_config("")
    match loaded.inner:
        case Err(error=config_error):
            return Result.err(AppError(message=config_error_message(config_error), exit_code=EXIT_USAGE))
        case Ok(value=spec):
            pass

    environment = read_environment()
    match environment.inner:
        case Err(error=env_error):
            return Result.err(AppError(message=environment_error_message(env_error), exit_code=EXIT_USAGE))
        case Ok(value=settings):
            env_layer = Overrides(source="environment", out=settings.out, jobs=settings.jobs)

    if mode == "sweep":
        cli_layer = Overrides(
            source="command line", out=parsed.out, seed=parsed.seed, jobs=parsed.jobs, ra=parsed.ra, pr=parsed.pr
        )
    else:
        update = {"Ra": parsed.ra[0]} if parsed.ra else {}
        update |= {"Pr": parsed.pr[0]} if parsed.pr else {}
        if update:
            spec = spec.model_copy(update={"simulation": spec.simulation.model_copy(update=update)})
        cli_layer = Overrides(source="command line", out=parsed.out, seed=parsed.seed, jobs=parsed.jobs)

    merged = apply_overrides(spec, mode, env_layer, cli_layer)
    match merged.inner:
        case Err(error=merge_error):
            return Result.err(AppError(message=config_error_message(merge_error), exit_code=EXIT_USAGE))
        case Ok(value=resolved):
            return Result.ok(resolved)


def run_command(command_type: CommandType, spec: RunSpec, parsed: ParsedArgs) -> int:
    """Execute the appropriate command handler."""
    match command_type:
        case CommandType.SIMULATE:
            return execute_simulate(spec, parsed.resume)
        case CommandType.SWEEP:
            return execute_sweep(spec)
        case CommandType.CERTIFY_STOKES:
            return execute_certify_stokes(spec)
        case CommandType.CERTIFY_KERNELS:
            return execute_certify_kernels(spec)
        case CommandType.STABILITY_SCAN:
            return execute_stability_scan(spec)
        case CommandType.HELP:
            return EXIT_USAGE


def run(args: Optional[List[str]] = None) -> Result[AppError, int]:
    """Main application entry point."""
    parser = create_parser()

    try:
        namespace = parser.parse_args(args)
    except SystemExit as exit:
        return Result.ok(EXIT_USAGE if exit.code else 0)

    parsed_args = ParsedArgs(**vars(namespace))
    command_type = parsed_args.get_command_type()

    if command_type == CommandType.HELP:
        parser.print_help()
        return Result.ok(EXIT_USAGE)

    mode: Mode = command_type.value  # type: ignore[assignment]
    resolved = resolve_spec(mode, parsed_args)
    match resolved.inner:
        case Err(error=e):
            return Result.err(e)
        case Ok(value=spec):
            return Result.ok(run_command(command_type, spec, parsed_args))


def safe_run(args: Optional[List[str]] = None) -> int:
    """Wrapper that catches exceptions and returns exit code."""
    console = Console()

    try:
        result = run(args)
        match result.inner:
            case Ok(value=exit_code):
                return exit_code
            case Err(error=e):
                console.print(f"[red]{error_to_message(e)}[/red]")
                return e.exit_code
    except KeyboardInterrupt:
        console.print("\n\nOperation cancelled by user.")
        return 1
    except Exception as e:
        console.print(f"[red]Error: {e}[/red]")
        return 1


def main() -> int:
    initialize()
    return safe_run(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
