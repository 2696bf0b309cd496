"""Run configuration: INI-style text with `[section]` headers and `key = value` lines.

Grammar, one item per line:

    # comment            ; comment
    [section]
    key = value          lists are comma separated, Pr accepts `inf`, Nx/Nz/dt accept `auto`

Every key has a default. Unknown sections and keys are rejected with their line number.
"""

import math

from pathlib import Path
from typing import Any, Callable, Dict, Literal, Optional, Union

from pydantic import ValidationError, model_validator

from common.base import BaseFrozen
from common.errors import ParameterError
from common.result import Err, Ok, Result, try_catch
from domains.boussinesq.params import SimParams, auto_resolution, auto_time_step
from domains.stokes.certify import KernelConfig, StokesConfig


Mode = Literal["simulate", "sweep", "certify-stokes", "certify-kernels", "stability-scan"]
MODES: tuple[Mode, ...] = ("simulate", "sweep", "certify-stokes", "certify-kernels", "stability-scan")


class SimulationSettings(BaseFrozen):
    """Simulation keys; `None` resolution or step means the Ra-dependent automatic choice."""

    Ra: float = 1e5
    Pr: float = 1.0
    L: float = 2.0
    Nx: Optional[int] = None
    Nz: Optional[int] = None
    dt: Optional[float] = None
    t_end: float = 1.0
    transient_fraction: float = 0.3
    amplitude: float = 1e-2
    sample_every: int = 10
    checkpoint_every: int = 0
    cfl_limit: float = 0.5

    def params(self, Ra: Optional[float] = None, Pr: Optional[float] = None) -> SimParams:
        Ra = self.Ra if Ra is None else Ra
        Pr = self.Pr if Pr is None else Pr
        auto_nx, auto_nz = auto_resolution(Ra)
        Nx = self.Nx if self.Nx is not None else auto_nx
        Nz = self.Nz if self.Nz is not None else auto_nz
        dt = self.dt if self.dt is not None else auto_time_step(Ra, Pr, self.L, Nx, Nz)
        return SimParams(
            Ra=Ra,
            Pr=Pr,
            L=self.L,
            Nx=Nx,
            Nz=Nz,
            dt=dt,
            t_end=self.t_end,
            transient_fraction=self.transient_fraction,
            cfl_limit=self.cfl_limit,
            sample_every=self.sample_every,
            checkpoint_every=self.checkpoint_every,
        )


class SweepAxes(BaseFrozen):
    ra: list[float] = [1e4, 3e4, 1e5]
    pr: list[float] = [1.0]

    @model_validator(mode="after")
    def _check_axes(self) -> "SweepAxes":
        if any(not 1.0 < value < math.inf for value in self.ra):
            raise ParameterError(message="sweep Ra values must be finite and greater than 1")
        if any(not value > 0.0 for value in self.pr):
            raise ParameterError(message="sweep Pr values must be positive or inf")
        return self

    @property
    def points(self) -> list[tuple[float, float]]:
        return [(ra, pr) for pr in self.pr for ra in self.ra]


class StabilitySettings(BaseFrozen):
    ra_low: float = 1690.0
    ra_high: float = 1730.0
    k_min: float = 1.5
    k_max: float = 5.0
    Nz: int = 33

    @model_validator(mode="after")
    def _check_brackets(self) -> "StabilitySettings":
        if not 0.0 < self.ra_low < self.ra_high or not 0.0 < self.k_min < self.k_max:
            raise ParameterError(message="stability brackets need 0 < ra_low < ra_high and 0 < k_min < k_max")
        return self


class RunSpec(BaseFrozen):
    mode: Mode = "simulate"
    out: str = "out"
    seed: int = 0
    jobs: int = 1
    simulation: SimulationSettings = SimulationSettings()
    sweep: SweepAxes = SweepAxes()
    stokes: StokesConfig = StokesConfig()
    kernels: KernelConfig = KernelConfig()
    stability: StabilitySettings = StabilitySettings()

    @model_validator(mode="after")
    def _check_run(self) -> "RunSpec":
        if self.jobs < 1:
            raise ParameterError(message=f"jobs must be >= 1, got {self.jobs}")
        if self.mode == "sweep" and (not self.sweep.ra or not self.sweep.pr):
            raise ParameterError(message="sweep mode needs non-empty ra and pr axes")
        return self

    @property
    def out_dir(self) -> Path:
        return Path(self.out)


class ConfigSyntaxError(BaseFrozen):
    line: int
    message: str


class UnknownKey(BaseFrozen):
    section: str
    key: str
    line: int


class InvalidValue(BaseFrozen):
    key: str
    line: int
    message: str


class ConfigNotFound(BaseFrozen):
    path: str


ConfigError = Union[ConfigSyntaxError, UnknownKey, InvalidValue, ConfigNotFound]


def error_to_message(error: ConfigError) -> str:
    match error:
        case ConfigSyntaxError(line=line, message=m):
            return f"Config syntax error on line {line}: {m}"
        case UnknownKey(section=s, key=k, line=line):
            return f"Unknown key '{k}' in [{s}] on line {line}"
        case InvalidValue(key=k, line=line, message=m):
            return f"Invalid value for '{k}' on line {line}: {m}"
        case ConfigNotFound(path=p):
            return f"Config not found at {p}"


def _to_float(text: str) -> float:
    value = float(text)
    if math.isnan(value):
        raise ValueError("nan is not accepted")
    return value


def _to_int(text: str) -> int:
    return int(text)


def _to_bool(text: str) -> bool:
    match text.lower():
        case "true" | "yes" | "1":
            return True
        case "false" | "no" | "0":
            return False
        case _:
            raise ValueError(f"expected a boolean, got '{text}'")


def _auto(convert: Callable[[str], Any]) -> Callable[[str], Any]:
    return lambda text: None if text.lower() == "auto" else convert(text)


def _float_list(text: str) -> list[float]:
    return [_to_float(item) for item in text.split(",") if item.strip()]


def _text(text: str) -> str:
    return text


def _mode(text: str) -> str:
    if text not in MODES:
        raise ValueError(f"mode must be one of {', '.join(MODES)}")
    return text


Converters = Dict[str, Callable[[str], Any]]

SECTIONS: Dict[str, Converters] = {
    "run": {"mode": _mode, "out": _text, "seed": _to_int, "jobs": _to_int},
    "simulation": {
        "Ra": _to_float,
        "Pr": _to_float,
        "L": _to_float,
        "Nx": _auto(_to_int),
        "Nz": _auto(_to_int),
        "dt": _auto(_to_float),
        "t_end": _to_float,
        "transient_fraction": _to_float,
        "amplitude": _to_float,
        "sample_every": _to_int,
        "checkpoint_every": _to_int,
        "cfl_limit": _to_float,
    },
    "sweep": {"ra": _float_list, "pr": _float_list},
    "stokes": {
        "R": _to_float,
        "R0": _to_float,
        "L": _to_float,
        "Nx": _to_int,
        "Nz": _to_int,
        "Nt": _to_int,
        "t_horizon": _to_float,
        "trials": _to_int,
        "ceiling": _to_float,
        "negative_factor": _to_float,
        "domain": _text,
        "with_divergence": _to_bool,
        "refine": _to_bool,
    },
    "kernels": {
        "t_min": _to_float,
        "t_max": _to_float,
        "t_count": _to_int,
        "ceiling": _to_float,
        "horizontal_dimension": _to_int,
        "variation_limit": _to_float,
    },
    "stability": {"ra_low": _to_float, "ra_high": _to_float, "k_min": _to_float, "k_max": _to_float, "Nz": _to_int},
}

SECTION_MODELS: Dict[str, type[BaseFrozen]] = {
    "simulation": SimulationSettings,
    "sweep": SweepAxes,
    "stokes": StokesConfig,
    "kernels": KernelConfig,
    "stability": StabilitySettings,
}


class _Entry(BaseFrozen):
    value: Any
    line: int


def _strip_comment(raw: str) -> str:
    for marker in ("#", ";"):
        index = raw.find(marker)
        if index >= 0:
            raw = raw[:index]
    return raw.strip()


def _collect(text: str) -> Result[ConfigError, Dict[str, Dict[str, _Entry]]]:
    sections: Dict[str, Dict[str, _Entry]] = {name: {} for name in SECTIONS}
    headers: Dict[str, int] = {}
    current: Optional[str] = None

    for number, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                return Result.err(ConfigSyntaxError(line=number, message=f"unterminated section header '{line}'"))
            current = line[1:-1].strip()
            if current not in SECTIONS:
                return Result.err(UnknownKey(section=current, key=f"[{current}]", line=number))
            if current in headers:
                return Result.err(ConfigSyntaxError(line=number, message=f"section [{current}] repeated"))
            headers[current] = number
            continue
        if "=" not in line:
            return Result.err(ConfigSyntaxError(line=number, message=f"expected 'key = value', got '{line}'"))
        if current is None:
            return Result.err(ConfigSyntaxError(line=number, message="key outside of any [section]"))

        key, value = (part.strip() for part in line.split("=", 1))
        converters = SECTIONS[current]
        if key not in converters:
            return Result.err(UnknownKey(section=current, key=key, line=number))
        if key in sections[current]:
            return Result.err(ConfigSyntaxError(line=number, message=f"key '{key}' repeated in [{current}]"))
        try:
            sections[current][key] = _Entry(value=converters[key](value), line=number)
        except ValueError as error:
            return Result.err(InvalidValue(key=key, line=number, message=str(error)))
    return Result.ok(sections)


def _build_section(name: str, entries: Dict[str, _Entry], fallback_line: int) -> Result[ConfigError, Any]:
    values = {key: entry.value for key, entry in entries.items()}
    built = try_catch(lambda: SECTION_MODELS[name](**values))
    match built.inner:
        case Ok(value=model):
            return Result.ok(model)
        case Err(error=ValidationError() as error):
            detail = error.errors()[0]
            key = str(detail["loc"][0]) if detail["loc"] else name
            line = entries[key].line if key in entries else fallback_line
            return Result.err(InvalidValue(key=key, line=line, message=detail["msg"]))
        case Err(error=error):
            return Result.err(InvalidValue(key=name, line=fallback_line, message=str(error)))


def parse_config(text: str) -> Result[ConfigError, RunSpec]:
    collected = _collect(text)
    match collected.inner:
        case Err(error=error):
            return Result.err(error)
        case Ok(value=sections):
            pass

    def first_line(entries: Dict[str, _Entry]) -> int:
        return min((entry.line for entry in entries.values()), default=0)

    models: Dict[str, Any] = {}
    for name in SECTION_MODELS:
        built = _build_section(name, sections[name], first_line(sections[name]))
        match built.inner:
            case Err(error=error):
                return Result.err(error)
            case Ok(value=model):
                models[name] = model

    run = {key: entry.value for key, entry in sections["run"].items()}
    spec = try_catch(lambda: RunSpec(**run, **models))
    match spec.inner:
        case Ok(value=value):
            return Result.ok(value)
        case Err(error=ValidationError() as error):
            detail = error.errors()[0]
            key = str(detail["loc"][0]) if detail["loc"] else "run"
            line = sections["run"][key].line if key in sections["run"] else 0
            return Result.err(InvalidValue(key=key, line=line, message=detail["msg"]))
        case Err(error=error):
            line = first_line(sections["run"]) or first_line(sections["sweep"])
            return Result.err(InvalidValue(key="run", line=line, message=str(error)))


def load_config(path: Path) -> Result[ConfigError, RunSpec]:
    if not path.is_file():
        return Result.err(ConfigNotFound(path=str(path)))
    read = try_catch(lambda: path.read_text(encoding="utf-8"))
    match read.inner:
        case Err(error=error):
            return Result.err(ConfigSyntaxError(line=0, message=str(error)))
        case Ok(value=text):
            return parse_config(text)


def _format(value: Any) -> str:
    match value:
        case None:
            return "auto"
        case bool():
            return "true" if value else "false"
        case float():
            return repr(value)
        case list():
            return ", ".join(_format(item) for item in value)
        case _:
            return str(value)


def serialize_config(spec: RunSpec) -> str:
    """Canonical text form; parsing it yields a spec equal to `spec`."""
    blocks: list[str] = []
    for name, converters in SECTIONS.items():
        source = spec if name == "run" else getattr(spec, name)
        lines = [f"[{name}]"] + [f"{key} = {_format(getattr(source, key))}" for key in converters]
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


class Overrides(BaseFrozen):
    """One layer of overrides (environment or command line); `source` names it in errors."""

    source: str
    out: Optional[str] = None
    seed: Optional[int] = None
    jobs: Optional[int] = None
    ra: Optional[list[float]] = None
    pr: Optional[list[float]] = None


def apply_overrides(spec: RunSpec, mode: Mode, *layers: Overrides) -> Result[ConfigError, RunSpec]:
    """Later layers win; the merged spec is validated again."""
    fields: Dict[str, Any] = {name: getattr(spec, name) for name in RunSpec.model_fields}
    fields["mode"] = mode
    for layer in layers:
        for key in ("out", "seed", "jobs"):
            value = getattr(layer, key)
            if value is not None:
                fields[key] = value
        if layer.ra is not None or layer.pr is not None:
            axes = fields["sweep"]
            ra = layer.ra if layer.ra is not None else axes.ra
            pr = layer.pr if layer.pr is not None else axes.pr
            rebuilt = try_catch(lambda: SweepAxes(ra=ra, pr=pr))
            match rebuilt.inner:
                case Ok(value=sweep):
                    fields["sweep"] = sweep
                case Err(error=error):
                    return Result.err(InvalidValue(key=f"{layer.source} ra/pr", line=0, message=str(error)))

    merged = try_catch(lambda: RunSpec(**fields))
    match merged.inner:
        case Ok(value=value):
            return Result.ok(value)
        case Err(error=error):
            return Result.err(InvalidValue(key="overrides", line=0, message=str(error)))
