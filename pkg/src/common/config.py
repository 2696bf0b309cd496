"""Environment overrides, read after `.env` has been loaded."""

import os

from typing import Optional

from common.base import BaseFrozen
from common.result import Result


ENV_OUT_DIR = "RBLAB_OUT_DIR"
ENV_JOBS = "RBLAB_JOBS"
ENV_LOG_LEVEL = "RBLAB_LOG_LEVEL"

LOG_LEVELS = ("quiet", "info", "debug")


class EnvironmentSettings(BaseFrozen):
    out: Optional[str] = None
    jobs: Optional[int] = None


class InvalidEnvironment(BaseFrozen):
    name: str
    value: str
    message: str


def error_to_message(error: InvalidEnvironment) -> str:
    return f"Environment variable {error.name}='{error.value}': {error.message}"


def _read(name: str) -> Optional[str]:
    value = os.getenv(name)
    if value is None or not value.strip():
        return None
    return value.strip()


def read_environment() -> Result[InvalidEnvironment, EnvironmentSettings]:
    level = _read(ENV_LOG_LEVEL)
    if level is not None and level.lower() not in LOG_LEVELS:
        return Result.err(InvalidEnvironment(name=ENV_LOG_LEVEL, value=level, message=f"expected one of {LOG_LEVELS}"))

    jobs_text = _read(ENV_JOBS)
    jobs: Optional[int] = None
    if jobs_text is not None:
        try:
            jobs = int(jobs_text)
        except ValueError:
            return Result.err(InvalidEnvironment(name=ENV_JOBS, value=jobs_text, message="expected an integer"))
        if jobs < 1:
            return Result.err(InvalidEnvironment(name=ENV_JOBS, value=jobs_text, message="must be at least 1"))

    return Result.ok(EnvironmentSettings(out=_read(ENV_OUT_DIR), jobs=jobs))
