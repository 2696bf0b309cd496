from dataclasses import dataclass
from typing import Optional


@dataclass(eq=False)
class LabError(Exception):
    message: str

    def __str__(self) -> str:
        return self.message


@dataclass(eq=False)
class ConfigurationError(LabError):
    pass


@dataclass(eq=False)
class SymmetryError(LabError):
    pass


@dataclass(eq=False)
class SingularModeError(LabError):
    pass


@dataclass(eq=False)
class ParameterError(LabError):
    pass


@dataclass(eq=False)
class StepSizeError(LabError):
    pass


@dataclass(eq=False)
class DivergenceError(LabError):
    pass


@dataclass(eq=False)
class NumericalError(LabError):
    pass


@dataclass(eq=False)
class StateError(LabError):
    pass


@dataclass(eq=False)
class InputError(LabError):
    pass


@dataclass(eq=False)
class LocalizationError(LabError):
    residual: float = 0.0


@dataclass(eq=False)
class StageError(LabError):
    stage: str = ""
    residual: float = 0.0
    tolerance: float = 0.0

    def __str__(self) -> str:
        return f"{self.stage}: {self.message} (residual {self.residual:.3e} > {self.tolerance:.1e})"


@dataclass(eq=False)
class FitError(LabError):
    pass


@dataclass(eq=False)
class DomainError(LabError):
    pass


@dataclass(eq=False)
class SimulationFailure(LabError):
    time: float = 0.0
    cause: Optional[str] = None

    def __str__(self) -> str:
        return f"{self.message} at t={self.time:.6g}" + (f": {self.cause}" if self.cause else "")


@dataclass(eq=False)
class CeilingExceeded(LabError):
    ratio: float = 0.0
    ceiling: float = 0.0

