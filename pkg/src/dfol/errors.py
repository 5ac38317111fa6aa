"""Diagnostics shared by the checker, the semantics and the front end."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

SCHEMA_VERSION = "1.0"


@dataclass
class Diagnostic:
    """A machine-readable failure report.

    ``path`` addresses a node in a derivation tree (premise indices from
    the root) or a subformula/subterm (child indices).
    """

    rule: str
    reason: str
    message: str
    path: tuple[int, ...] = ()
    expected: str | None = None
    found: str | None = None
    witness: dict[str, Any] | None = None

    def to_json(self) -> dict[str, Any]:
        return {
            "version": SCHEMA_VERSION,
            "rule": self.rule,
            "reason": self.reason,
            "message": self.message,
            "path": list(self.path),
            "expected": self.expected,
            "found": self.found,
            "witness": self.witness,
        }

    def __str__(self) -> str:
        loc = "/".join(str(i) for i in self.path) or "root"
        out = f"[{self.rule}] at {loc}: {self.reason}: {self.message}"
        if self.expected is not None:
            out += f"\n  expected: {self.expected}"
        if self.found is not None:
            out += f"\n  found:    {self.found}"
        if self.witness:
            out += f"\n  witness:  {self.witness}"
        return out


class DfolError(Exception):
    """Base class; carries a Diagnostic."""

    def __init__(self, diag: Diagnostic):
        super().__init__(str(diag))
        self.diag = diag


class TypeCheckError(DfolError):
    pass


class WellFormednessError(DfolError):
    pass


class KernelError(DfolError):
    pass


class TacticError(DfolError):
    pass


class ModelError(DfolError):
    pass


class SizeGuardError(Exception):
    """An interpreted type or enumeration exceeded its size guard."""


class BudgetExhausted(Exception):
    """A search ran out of its time budget."""

    def __init__(self, message: str, progress: dict[str, Any] | None = None):
        super().__init__(message)
        self.progress = progress or {}


@dataclass
class ParseError(Exception):
    line: int
    column: int
    expected: str
    found: str = ""
    source: str = field(default="<input>")

    def __str__(self) -> str:
        got = f", found {self.found!r}" if self.found else ""
        return f"{self.source}:{self.line}:{self.column}: expected {self.expected}{got}"
