"""Diagnostics shared by every compilation stage."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    line: int = 1
    column: int = 1
    origin: str = "<memory>"

    def __str__(self) -> str:
        return f"{self.origin}:{self.line}:{self.column}: {self.severity}: {self.message}"


class CompileError(Exception):
    """Raised by any stage that produced at least one error diagnostic."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


@dataclass
class DiagnosticSink:
    origin: str = "<memory>"
    items: list[Diagnostic] = field(default_factory=list)

    def error(self, message: str, line: int = 1, column: int = 1) -> None:
        self.items.append(Diagnostic("error", message, max(line, 1), max(column, 1), self.origin))

    def warning(self, message: str, line: int = 1, column: int = 1) -> None:
        self.items.append(Diagnostic("warning", message, max(line, 1), max(column, 1), self.origin))

    @property
    def has_errors(self) -> bool:
        return any(d.severity == "error" for d in self.items)

    def raise_if_errors(self) -> None:
        if self.has_errors:
            raise CompileError(self.items)
