from typing import Any, Dict, Type, TypeVar

from pydantic import BaseModel, ValidationError

from common.errors import LabError
from common.result import Err, Ok, Result


T = TypeVar("T", bound=BaseModel)


def try_parse_json(model_type: Type[T], data: Dict[str, Any]) -> Result[str, T]:
    """Validates `data` into `model_type`; domain validators surface their own message."""
    try:
        return Result(Ok(model_type.model_validate(data)))
    except ValidationError as e:
        return Result(Err("; ".join(f"{'.'.join(str(part) for part in err['loc'])}: {err['msg']}" for err in e.errors())))
    except LabError as e:
        return Result(Err(str(e)))
