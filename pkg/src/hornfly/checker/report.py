"""Verdicts -> source-anchored diagnostics.

Severity mapping is fixed: false -> error, check -> warning,
checked -> verified. Library-origin assertions are reported at the
witnessing call site (the assertion itself has no user-visible source).
"""

from __future__ import annotations

from ..diags import Diagnostic, Related
from ..engine.graph import AnalysisResult, CallKey
from ..engine.workspace import Workspace
from ..frontend.ast import ClauseId
from ..frontend.lexer import ZERO_SPAN, Span
from ..frontend.pretty import format_goal_list, format_term
from .conditions import CallsCond, CompCond, SuccessCond
from .verdicts import CHECK, CHECKED, FALSE, CheckVerdict

_SEVERITY = {FALSE: "error", CHECK: "warning", CHECKED: "verified"}


def report(
    w: Workspace,
    results: dict[str, AnalysisResult],
    verdicts: list[CheckVerdict],
    parse_errors: list[Diagnostic],
) -> list[Diagnostic]:
    out = list(parse_errors)
    for v in verdicts:
        out.append(_verdict_diag(w, results, v))
    out.sort(key=Diagnostic.sort_key)
    return out


def _verdict_diag(w, results, v: CheckVerdict) -> Diagnostic:
    severity = _SEVERITY[v.status]
    related: list[Related] = []
    call_sites = _witness_sites(w, results, v)
    for file, span, msg in call_sites:
        related.append(Related(file, span, msg))

    if v.condition is not None:
        c = v.condition
        module = c.module
        m = w.module(module)
        file = m.path if m is not None else module
        span = c.span
        library_origin = module in w.lib_modules
        if library_origin and call_sites:
            file, span, _ = call_sites[0]
            related = related[1:]
        desc = _condition_text(c)
        code = f"{c.kind}.{v.status}"
    else:
        m = w.module(v.pp_module)
        file = m.path if m is not None else v.pp_module
        span = v.span or ZERO_SPAN
        desc = f"program-point check({format_goal_list(v.pp_formula)})"
        code = f"pp.{v.status}"

    bits = [f"{desc}: status {v.status}"]
    for wit in v.witnesses[:3]:
        bits.append(f"[{wit.domain_id}] {wit.rendering}")
    bits.extend(v.notes)
    message = "; ".join(bits)
    return Diagnostic(file, span or ZERO_SPAN, severity, message, code, tuple(related))


def _condition_text(c) -> str:
    if isinstance(c, CallsCond):
        pres = " ; ".join(f"({format_goal_list(d) or 'true'})" for d in c.pre_disjuncts)
        return f"calls condition for {format_term(c.head)}: {pres}"
    if isinstance(c, SuccessCond):
        return (
            f"success condition for {format_term(c.head)}: "
            f"({format_goal_list(c.pre) or 'true'}) => ({format_goal_list(c.post)})"
        )
    assert isinstance(c, CompCond)
    return f"comp condition for {format_term(c.head)}: + ({format_goal_list(c.comp)})"


def _witness_sites(w, results, v: CheckVerdict) -> list[tuple[str, Span, str]]:
    """Source positions of calls reaching the witnessing analysis nodes."""
    out: list[tuple[str, Span, str]] = []
    seen = set()
    for wit in v.witnesses:
        if wit.call_key is None:
            continue
        result = results.get(wit.domain_id)
        if result is None:
            continue
        for (caller, cid_str, pos), callee in result.edges.items():
            if callee != wit.call_key:
                continue
            site = _body_span(w, cid_str, pos)
            if site is None or site in seen:
                continue
            seen.add(site)
            out.append((site[0], site[1], f"call pattern [{wit.domain_id}] {wit.rendering}"))
    return out


def _body_span(w: Workspace, cid_str: str, pos: int):
    try:
        module_name, rest = cid_str.split(":", 1)
        pred, rest2 = rest.split("#", 1)
        chash, ordinal = rest2.rsplit(".", 1)
        cid = ClauseId(module_name, pred, chash, int(ordinal))
    except ValueError:
        return None
    m = w.module(module_name)
    if m is None:
        return None
    c = m.clause_by_id(cid)
    if c is None or pos >= len(c.body):
        return None
    return (m.path, c.body[pos].span)


def render_lines(diags: list[Diagnostic]) -> str:
    return "\n".join(d.render_line() for d in diags)
