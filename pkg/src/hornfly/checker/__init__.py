"""Assertion checking: conditions, verdicts, diagnostics, rtcheck rewriting."""

from .annotate import annotate_runtime_checks
from .api import CheckerConfig, check_workspace
from .conditions import (
    AssertionCondition,
    CallsCond,
    CompCond,
    SuccessCond,
    build_conditions,
)
from .evidence import OracleEvidence, entry_queries
from .report import render_lines, report
from .verdicts import (
    CHECK,
    CHECKED,
    FALSE,
    CheckVerdict,
    PerDomain,
    Witness,
    check_calls,
    check_comp,
    check_program_point,
    check_success,
    combine_verdicts,
)

__all__ = [
    "annotate_runtime_checks",
    "CheckerConfig",
    "check_workspace",
    "AssertionCondition",
    "CallsCond",
    "CompCond",
    "SuccessCond",
    "build_conditions",
    "OracleEvidence",
    "entry_queries",
    "render_lines",
    "report",
    "CHECK",
    "CHECKED",
    "FALSE",
    "CheckVerdict",
    "PerDomain",
    "Witness",
    "check_calls",
    "check_comp",
    "check_program_point",
    "check_success",
    "combine_verdicts",
]
