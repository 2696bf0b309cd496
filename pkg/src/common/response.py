from typing import Any, Dict, Union

from common.errors import (
    CeilingExceeded,
    ConfigurationError,
    DomainError,
    FitError,
    InputError,
    LabError,
    ParameterError,
    SimulationFailure,
    StageError,
)


STATUS_OK = 200
STATUS_INVALID = 400
STATUS_CEILING = 409
STATUS_FAILURE = 500


def to_response(failure: Exception) -> tuple[Dict[str, Any], int]:
    match failure:
        case ConfigurationError() | ParameterError() | InputError() | DomainError():
            return {"error": {"message": str(failure), "kind": failure.__class__.__name__}}, STATUS_INVALID
        case CeilingExceeded(ratio=ratio, ceiling=ceiling):
            content = {"error": {"message": str(failure), "ratio": ratio, "ceiling": ceiling}}
            return content, STATUS_CEILING
        case SimulationFailure(time=t, cause=cause):
            return {"error": {"message": str(failure), "time": t, "cause": cause}}, STATUS_FAILURE
        case StageError(stage=stage, residual=residual, tolerance=tolerance):
            content = {"error": {"message": str(failure), "stage": stage, "residual": residual, "tolerance": tolerance}}
            return content, STATUS_FAILURE
        case FitError() | LabError():
            return {"error": {"message": str(failure), "kind": failure.__class__.__name__}}, STATUS_FAILURE
        case _:
            return {"error": {"message": f"Internal error: {failure}"}}, STATUS_FAILURE


def json_response(data: Union[Dict[str, Any], Any], status: int = STATUS_OK) -> tuple[Dict[str, Any], int]:
    if isinstance(data, dict):
        return data, status
    to_json = getattr(data, "to_json", None)
    if to_json is None:
        raise TypeError(f"Expected a dict or an object with to_json, got {type(data).__name__}")
    return to_json(), status


def exit_code(status: int) -> int:
    match status:
        case 200:
            return 0
        case 400:
            return 2
        case 409:
            return 3
        case _:
            return 1
