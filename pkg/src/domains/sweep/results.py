"""Sweep rows and the versioned CSV layout they are persisted in."""

import math

from pathlib import Path
from typing import Any, Dict, Literal, Optional

import pandas as pd

from pydantic import model_validator

from common.base import BaseFrozen
from common.errors import InputError
from common.result import Err, Ok, Result, try_catch
from domains.diagnostics.bounds import Branch, branch_of


CSV_SCHEMA = 1

CSV_COLUMNS: tuple[str, ...] = (
    "Ra",
    "Pr",
    "L",
    "Nx",
    "Nz",
    "dt",
    "t_avg",
    "nu_plane_mean",
    "nu_volume",
    "nu_dissipation",
    "spread",
    "energy_residual",
    "min_T",
    "max_T",
    "hardy_max",
    "wall_clock",
    "branch",
    "status",
    "error",
)

INT_COLUMNS = ("Nx", "Nz")
TEXT_COLUMNS = ("branch", "status", "error")
MEASURED = ("t_avg", "nu_plane_mean", "nu_volume", "nu_dissipation", "spread", "energy_residual", "min_T", "max_T")

Status = Literal["ok", "failed"]


def branch_for(Ra: float, Pr: float) -> Optional[Branch]:
    return branch_of(Ra, Pr) if Ra > 1.0 else None


class SweepRow(BaseFrozen):
    Ra: float
    Pr: float
    L: float
    Nx: int
    Nz: int
    dt: float
    t_avg: float = math.nan
    nu_plane_mean: float = math.nan
    nu_volume: float = math.nan
    nu_dissipation: float = math.nan
    spread: float = math.nan
    energy_residual: float = math.nan
    min_T: float = math.nan
    max_T: float = math.nan
    hardy_max: float = math.nan
    wall_clock: float = 0.0
    branch: Optional[Branch] = None
    status: Status = "ok"
    error: Optional[str] = None

    @model_validator(mode="after")
    def _check_status(self) -> "SweepRow":
        match self.status:
            case "ok":
                if self.error is not None:
                    raise InputError(message=f"completed row at Ra={self.Ra:g} carries an error tag")
                if not all(math.isfinite(getattr(self, name)) for name in MEASURED):
                    raise InputError(message=f"completed row at Ra={self.Ra:g} has non-finite diagnostics")
            case "failed":
                if not self.error:
                    raise InputError(message=f"failed row at Ra={self.Ra:g} has no error tag")
        return self

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def record(self) -> Dict[str, Any]:
        return {name: getattr(self, name) for name in CSV_COLUMNS}


class SweepResult(BaseFrozen):
    rows: list[SweepRow]
    csv_path: Optional[str] = None
    summary_path: Optional[str] = None

    @property
    def completed(self) -> list[SweepRow]:
        return [row for row in self.rows if row.ok]

    @property
    def failed(self) -> list[SweepRow]:
        return [row for row in self.rows if not row.ok]

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame([row.record() for row in self.rows], columns=list(CSV_COLUMNS))


def write_header(path: Path) -> None:
    pd.DataFrame(columns=list(CSV_COLUMNS)).to_csv(path, index=False)


def append_row(path: Path, row: SweepRow) -> None:
    """Appends one row; the file is closed again before returning."""
    frame = pd.DataFrame([row.record()], columns=list(CSV_COLUMNS))
    frame.to_csv(path, mode="a", header=False, index=False, float_format="%.12g")


def _cell(name: str, value: Any) -> Any:
    if name in TEXT_COLUMNS:
        return None if pd.isna(value) else str(value)
    if name in INT_COLUMNS:
        return int(value)
    return float(value)


def row_from_record(record: Dict[str, Any]) -> SweepRow:
    return SweepRow(**{name: _cell(name, record[name]) for name in CSV_COLUMNS})


def validate_rows(path: Path) -> Result[InputError, list[SweepRow]]:
    """Reads a results CSV back and checks every row against the row contract."""
    read = try_catch(lambda: pd.read_csv(path))
    match read.inner:
        case Err(error=error):
            return Result.err(InputError(message=f"cannot read {path}: {error}"))
        case Ok(value=frame):
            pass

    if tuple(frame.columns) != CSV_COLUMNS:
        return Result.err(InputError(message=f"unexpected columns in {path}: {list(frame.columns)}"))

    rows: list[SweepRow] = []
    for index, record in enumerate(frame.to_dict(orient="records"), start=2):
        parsed = try_catch(lambda: row_from_record(record))
        match parsed.inner:
            case Ok(value=row):
                rows.append(row)
            case Err(error=error):
                return Result.err(InputError(message=f"{path} line {index}: {error}"))
    return Result.ok(rows)
