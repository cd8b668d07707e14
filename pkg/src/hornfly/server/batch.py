"""One-shot pipeline entry points shared by the CLI and the daemon."""

from __future__ import annotations

import os

from ..checker import CheckerConfig, annotate_runtime_checks
from ..diags import Diagnostic
from ..frontend.assertions import DesugarError, desugar_entry
from ..frontend.pretty import format_hc_module
from ..frontend.reader import ReadError, read_term
from .session import Session


def check_file(
    file_path: str,
    config: CheckerConfig | None = None,
    libdb_path: str | None = None,
    extra_entries: tuple[str, ...] = (),
) -> tuple[list[Diagnostic], dict, Session]:
    root = os.path.dirname(os.path.abspath(file_path)) or "."
    session = Session(root, config, libdb_path)
    if extra_entries:
        _install_extra_entries(session, extra_entries)
    diags, stats = session.check(file_path)
    return diags, stats, session


def _install_extra_entries(session: Session, entry_texts: tuple[str, ...]) -> None:
    """--entry='sort(+list, -)' style declarations appended to the root."""
    decls = []
    for text in entry_texts:
        rr = read_term(text)
        decls.append(desugar_entry(rr.term, rr.span))
    session.extra_entries = tuple(decls)


def annotate_file(session: Session, file_path: str) -> str:
    """Instrument the file's module with run-time checks for unresolved
    conditions; returns the rewritten module text."""
    session.check(file_path)
    assert session.workspace is not None
    m = session.workspace.modules.get(session.root_module)
    if m is None:
        raise ValueError(f"module for {file_path} did not load")
    instrumented = annotate_runtime_checks(m, session.last_verdicts)
    return format_hc_module(instrumented)


def entry_error_text(entry_texts: tuple[str, ...]) -> str | None:
    for text in entry_texts:
        try:
            rr = read_term(text)
            desugar_entry(rr.term, rr.span)
        except (ReadError, DesugarError) as e:
            return f"bad --entry {text!r}: {e}"
    return None
