"""Diagnostic types shared by every stage of the toolchain."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Pos:
    line: int = 0
    col: int = 0

    def __str__(self):
        return f"{self.line}:{self.col}"


class WidgetError(Exception):
    """Base class for user-visible errors carrying a source position."""

    def __init__(self, message, pos=None):
        super().__init__(message)
        self.message = message
        self.pos = pos or Pos()

    def render(self, filename="<input>"):
        return f"{filename}:{self.pos.line}:{self.pos.col}: {self.message}"


class SyntaxErr(WidgetError):
    pass


class TypeErr(WidgetError):
    pass


class RuntimeErr(WidgetError):
    """Internal evaluator/runtime failure; unreachable on checked programs."""
