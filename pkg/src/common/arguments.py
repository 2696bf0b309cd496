import argparse

from enum import Enum
from importlib.metadata import PackageNotFoundError, version as get_version
from typing import Optional

from pydantic import BaseModel, ConfigDict


class CommandType(Enum):
    SIMULATE = "simulate"
    SWEEP = "sweep"
    CERTIFY_STOKES = "certify-stokes"
    CERTIFY_KERNELS = "certify-kernels"
    STABILITY_SCAN = "stability-scan"
    HELP = "help"


class ParsedArgs(BaseModel):
    model_config = ConfigDict(frozen=True)

    command: Optional[str] = None
    config: Optional[str] = None
    out: Optional[str] = None
    seed: Optional[int] = None
    jobs: Optional[int] = None
    ra: Optional[list[float]] = None
    pr: Optional[list[float]] = None
    resume: Optional[str] = None

    def get_command_type(self) -> CommandType:
        match self.command:
            case "simulate":
                return CommandType.SIMULATE
            case "sweep":
                return CommandType.SWEEP
            case "certify-stokes":
                return CommandType.CERTIFY_STOKES
            case "certify-kernels":
                return CommandType.CERTIFY_KERNELS
            case "stability-scan":
                return CommandType.STABILITY_SCAN
            case _:
                return CommandType.HELP


class LabCLIConfig:
    prog = "rblab"
    description = "rb-lab - Rayleigh-Benard convection and Stokes maximal-regularity laboratory"
    epilog = (
        "Examples:\n"
        "    rblab simulate --ra 1e5 --pr 1\n"
        "    rblab sweep --ra 1e4,3e4,1e5 --pr 1 --jobs 3\n"
        "    rblab certify-kernels --out results"
    )


PACKAGE_NAME = "rb-lab"


def resolve_version() -> str:
    try:
        return get_version(PACKAGE_NAME)
    except PackageNotFoundError:
        return "unknown"


def float_list(text: str) -> list[float]:
    try:
        values = [float(item) for item in text.split(",") if item.strip()]
    except ValueError as error:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got '{text}'") from error
    if not values:
        raise argparse.ArgumentTypeError("expected at least one number")
    return values


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as error:
        raise argparse.ArgumentTypeError(f"expected an integer, got '{text}'") from error
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _add_common_flags(parser: argparse.ArgumentParser, with_axes: bool) -> None:
    parser.add_argument("--config", metavar="PATH", help="INI run configuration")
    parser.add_argument("--out", metavar="DIR", help="output directory")
    parser.add_argument("--seed", type=int, metavar="N", help="master random seed")
    parser.add_argument("--jobs", type=positive_int, metavar="N", help="worker processes")
    if with_axes:
        parser.add_argument("--ra", type=float_list, metavar="LIST", help="Rayleigh numbers, comma separated")
        parser.add_argument("--pr", type=float_list, metavar="LIST", help="Prandtl numbers, comma separated (inf allowed)")


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=LabCLIConfig.prog,
        description=LabCLIConfig.description,
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=LabCLIConfig.epilog,
    )

    parser.add_argument("-v", "--version", action="version", version=f"%(prog)s {resolve_version()}")

    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    simulate = subparsers.add_parser("simulate", help="Run one simulation and report its Nusselt diagnostics")
    _add_common_flags(simulate, with_axes=True)
    simulate.add_argument("--resume", metavar="CHECKPOINT", help="continue from a saved checkpoint")

    _add_common_flags(subparsers.add_parser("sweep", help="Run a Ra-Pr sweep with fits and plots"), with_axes=True)
    _add_common_flags(
        subparsers.add_parser("certify-stokes", help="Certify the Stokes maximal-regularity ratio"), with_axes=False
    )
    _add_common_flags(
        subparsers.add_parser("certify-kernels", help="Sample the heat-kernel constants"), with_axes=False
    )
    _add_common_flags(
        subparsers.add_parser("stability-scan", help="Locate the onset of convection"), with_axes=True
    )

    return parser
