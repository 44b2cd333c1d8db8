from __future__ import annotations

from dataclasses import dataclass

from .errors import CircirError
from .ir import Span


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    span: Span | None = None

    def __post_init__(self):
        if not self.message:
            raise ValueError("diagnostic message must be non-empty")

    def format(self, filename: str = "<input>") -> str:
        line, col = (self.span.line, self.span.col) if self.span else (0, 0)
        return f"{filename}:{line}:{col}: {self.severity}: {self.message}"

    @property
    def is_error(self) -> bool:
        return self.severity == "error"


def error(message: str, span: Span | None = None) -> Diagnostic:
    return Diagnostic("error", message, span)


class ParseError(CircirError):
    """Raised by the parser; carries every diagnostic it collected."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        first = self.diagnostics[0].format() if self.diagnostics else "parse error"
        super().__init__(first)
