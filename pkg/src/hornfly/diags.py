"""Source-anchored diagnostics: the tool's one output currency."""

from __future__ import annotations

from dataclasses import dataclass, field

from .frontend.lexer import Span

SEVERITIES = ("error", "warning", "verified", "info")


@dataclass(frozen=True, slots=True)
class Related:
    file: str
    span: Span
    message: str


@dataclass(frozen=True, slots=True)
class Diagnostic:
    file: str
    span: Span
    severity: str  # error | warning | verified | info
    message: str
    code: str = ""
    related: tuple[Related, ...] = ()

    def __post_init__(self) -> None:
        if self.severity not in SEVERITIES:
            raise ValueError(f"bad severity {self.severity!r}")

    def sort_key(self):
        return (self.file, self.span.start.offset, self.span.end.offset, self.code, self.message)

    def render_line(self) -> str:
        """The flycheck adaptor contract: path:line:col-line:col severity: message."""
        s, e = self.span.start, self.span.end
        return f"{self.file}:{s.line}:{s.col}-{e.line}:{e.col} {self.severity}: {self.message}"

    def to_json(self) -> dict:
        return {
            "file": self.file,
            "severity": self.severity,
            "message": self.message,
            "range": _range_json(self.span),
            "code": self.code,
            "related": [
                {"file": r.file, "range": _range_json(r.span), "message": r.message}
                for r in self.related
            ],
        }


def _range_json(span: Span) -> dict:
    return {
        "start": {"line": span.start.line, "col": span.start.col},
        "end": {"line": span.end.line, "col": span.end.col},
    }
