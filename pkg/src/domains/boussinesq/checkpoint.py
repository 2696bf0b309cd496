import json

from pathlib import Path

import numpy as np

from pydantic import ValidationError

from common.errors import InputError, LabError
from common.result import Result
from domains.boussinesq.params import SimParams
from domains.boussinesq.state import State
from domains.spectral.fields import ModalField


CHECKPOINT_SCHEMA = 1


def save_checkpoint(path: Path, state: State, params: SimParams) -> Path:
    """Writes the state arrays and a JSON header (schema, time, params) to an .npz file."""
    path.parent.mkdir(parents=True, exist_ok=True)
    header = {
        "schema": CHECKPOINT_SCHEMA,
        "t": state.t,
        "step_index": state.step_index,
        "params": params.model_dump(),
    }
    arrays = {"T": state.T.coefficients, "psi": state.psi.coefficients, "omega": state.omega.coefficients}
    if state.history is not None:
        arrays["history"] = state.history
    with path.open("wb") as handle:
        np.savez(handle, header=np.array(json.dumps(header)), **arrays)
    return path


def load_checkpoint(path: Path) -> Result[InputError, tuple[State, SimParams]]:
    if not path.is_file():
        return Result.err(InputError(message=f"checkpoint not found: {path}"))
    try:
        with np.load(path, allow_pickle=False) as archive:
            header = json.loads(str(archive["header"]))
            if header.get("schema") != CHECKPOINT_SCHEMA:
                return Result.err(InputError(message=f"unsupported checkpoint schema {header.get('schema')}"))
            params = SimParams.model_validate(header["params"], strict=False)
            grid = params.grid
            state = State(
                T=ModalField(coefficients=archive["T"], grid=grid),
                psi=ModalField(coefficients=archive["psi"], grid=grid),
                omega=ModalField(coefficients=archive["omega"], grid=grid),
                t=float(header["t"]),
                step_index=int(header["step_index"]),
                history=archive["history"] if "history" in archive.files else None,
            )
    except (OSError, KeyError, ValueError, ValidationError) as error:
        return Result.err(InputError(message=f"unreadable checkpoint {path}: {error}"))
    except LabError as error:
        return Result.err(InputError(message=f"invalid checkpoint {path}: {error}"))
    return Result.ok((state, params))
