from abc import ABC, abstractmethod
from typing import Any, Dict, Generic, TypeVar

from common.command.base_command import BaseCommand

C = TypeVar("C", bound=BaseCommand)


class BaseCommandHandler(Generic[C], ABC):
    @abstractmethod
    def handle_command(self, command: C) -> tuple[Dict[str, Any], int]:
        pass
