"""Validation diagnostics with stable codes."""

from __future__ import annotations

from dataclasses import dataclass

from ..kernel.errors import HetcoError


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    file: str | None = None
    line: int | None = None
    col: int | None = None
    severity: str = "error"

    def __str__(self):
        where = self.file or "<input>"
        if self.line is not None:
            where += f":{self.line}"
            if self.col is not None:
                where += f":{self.col}"
        return f"{where}: {self.severity}[{self.code}]: {self.message}"


class ConfigError(HetcoError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))

    @property
    def codes(self) -> list[str]:
        return [d.code for d in self.diagnostics]


def raise_if_errors(diags) -> None:
    errors = [d for d in diags if d.severity == "error"]
    if errors:
        raise ConfigError(errors)
