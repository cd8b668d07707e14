"""Module reader: text -> SourceModule.

Never raises on bad input; every failure becomes a parseErrors entry and
reading resynchronizes at the next clause terminator.
"""

from __future__ import annotations

import os

from ..diags import Diagnostic
from ..terms import Atom, Num, Struct, Term, Var, functor_arity, list_parts
from .assertions import DesugarError, RawAssertion, desugar_assertion, desugar_entry
from .ast import (
    Assertion,
    EntryDecl,
    PropDecl,
    SourceClause,
    SourceModule,
    STATUSES,
    content_hash,
    flatten_conj,
)
from .lexer import Span, tokenize
from .pretty import format_term
from .reader import ReadError, ReadResult, read_clause_chunk, split_clauses

KNOWN_PACKAGES = {"assertions"}


def parse_module(text: str, path: str) -> SourceModule:
    default_name = os.path.splitext(os.path.basename(path))[0] or "user"
    m = SourceModule(
        name=default_name,
        path=path,
        exports=None,
        imports=[],
        packages=[],
        clauses=[],
        assertions=[],
        prop_decls=[],
        entries=[],
        parse_errors=[],
    )

    def err(span: Span, message: str, severity: str = "error", code: str = "parse") -> None:
        m.parse_errors.append(Diagnostic(path, span, severity, message, code))

    saw_module_decl = False
    assertion_ordinals: dict[str, int] = {}

    for toks, span in split_clauses(tokenize(text)):
        try:
            rr = read_clause_chunk(toks, span)
        except ReadError as e:
            err(e.span if e.span else span, e.message)
            continue
        t = rr.term
        if isinstance(t, Struct) and t.functor == ":-" and len(t.args) == 1:
            _directive(m, t.args[0], rr, err, assertion_ordinals)
            if isinstance(t.args[0], Struct) and t.args[0].functor == "module":
                if saw_module_decl:
                    err(span, "duplicate module declaration", "warning", "module")
                saw_module_decl = True
            continue
        if isinstance(t, Struct) and t.functor == ":-" and len(t.args) == 2:
            head, body = t.args
            if not isinstance(head, (Atom, Struct)):
                err(span, "clause head must be an atom or compound term")
                continue
            _scan_pp_statuses(m, body, rr, err)
            m.clauses.append(SourceClause(head, body, span, rr.spans))
            continue
        if isinstance(t, (Atom, Struct)):
            m.clauses.append(SourceClause(t, None, span, rr.spans))
            continue
        err(span, f"not a clause: {format_term(t)}")

    _check_prop_definitions(m)
    return m


def _directive(m, d: Term, rr: ReadResult, err, ordinals: dict[str, int]) -> None:
    span = rr.span_of(d)

    if isinstance(d, Struct) and d.functor == "module" and len(d.args) in (2, 3):
        _module_header(m, d, span, err)
        return
    if isinstance(d, Struct) and d.functor == "use_module" and len(d.args) in (1, 2):
        _use_module(m, d, span, err)
        return
    if isinstance(d, Struct) and d.functor in ("prop", "regtype") and len(d.args) == 1:
        _prop_decl(m, d.functor, d.args[0], span, err)
        return

    status = "check"
    body = d
    if isinstance(d, Struct) and d.functor in STATUSES and len(d.args) == 1:
        status = d.functor
        body = d.args[0]

    if isinstance(body, Struct) and body.functor in ("pred", "entry", "mode") and len(body.args) == 1:
        kind = body.functor
        if "assertions" not in m.packages:
            err(span, "assertion syntax requires the 'assertions' package", "warning", "package")
            return
        try:
            if kind == "entry":
                if status != "check":
                    err(span, "entry declarations take no status")
                    return
                m.entries.append(desugar_entry(body.args[0], span))
                return
            raw = RawAssertion(kind, status, body.args[0], span)
            head, pre, post, comp = desugar_assertion(raw)
            name, arity = functor_arity(head)
            key = f"{name}/{arity}"
            n = ordinals.get(key, 0)
            ordinals[key] = n + 1
            digest = content_hash(format_term(head) + str((pre, post, comp, status)))
            aid = f"{m.name}:{key}@{n}:{status}:{digest}"
            m.assertions.append(Assertion(aid, status, head, pre, post, comp, span))
        except DesugarError as e:
            err(e.span, e.message)
        return

    if status != "check":
        err(span, f"status {status} must qualify a pred assertion")
        return
    err(span, f"unknown directive: {format_term(d, 999)}", "warning", "directive")


def _module_header(m, d: Struct, span: Span, err) -> None:
    name_t = d.args[0]
    if isinstance(name_t, Atom):
        m.name = name_t.name
    elif isinstance(name_t, Var):
        pass  # `_`: keep the filename-derived name
    else:
        err(span, "module name must be an atom")
    exports_t = d.args[1]
    if isinstance(exports_t, Var):
        m.exports = None
    else:
        exports = _name_arity_list(exports_t)
        if exports is None:
            err(span, "bad export list")
        else:
            m.exports = exports
    if len(d.args) == 3:
        items, tail = list_parts(d.args[2])
        if not isinstance(tail, Atom) or tail.name != "[]":
            err(span, "bad package list")
            return
        for pk in items:
            if isinstance(pk, Atom):
                m.packages.append(pk.name)
                if pk.name not in KNOWN_PACKAGES:
                    err(span, f"unknown package '{pk.name}' ignored", "warning", "package")
            else:
                err(span, "package names must be atoms")


def _use_module(m, d: Struct, span: Span, err) -> None:
    mod_t = d.args[0]
    if not isinstance(mod_t, Atom):
        err(span, "use_module expects a module name atom")
        return
    restriction: list[tuple[str, int]] | None = None
    if len(d.args) == 2:
        restriction = _name_arity_list(d.args[1])
        if restriction is None:
            err(span, "bad import list")
            return
    m.imports.append((mod_t.name, restriction))


def _prop_decl(m, kw: str, spec: Term, span: Span, err) -> None:
    is_regtype = kw == "regtype"
    if isinstance(spec, Struct) and spec.functor == "+" and len(spec.args) == 2:
        flag = spec.args[1]
        if isinstance(flag, Atom) and flag.name == "regtype":
            is_regtype = True
            spec = spec.args[0]
        else:
            err(span, f"unknown property flag: {format_term(flag)}")
            return
    na = _name_arity(spec)
    if na is None:
        err(span, f"{kw} declaration expects name/arity")
        return
    name, arity = na
    m.prop_decls.append(PropDecl(name, arity, is_regtype, span))


def _name_arity(t: Term) -> tuple[str, int] | None:
    if (
        isinstance(t, Struct)
        and t.functor == "/"
        and len(t.args) == 2
        and isinstance(t.args[0], Atom)
        and isinstance(t.args[1], Num)
        and isinstance(t.args[1].value, int)
    ):
        return t.args[0].name, t.args[1].value
    return None


def _name_arity_list(t: Term) -> list[tuple[str, int]] | None:
    items, tail = list_parts(t)
    if not isinstance(tail, Atom) or tail.name != "[]":
        return None
    out = []
    for item in items:
        na = _name_arity(item)
        if na is None:
            return None
        out.append(na)
    return out


def _scan_pp_statuses(m, body: Term, rr: ReadResult, err) -> None:
    for lit in flatten_conj(body):
        if isinstance(lit, Struct) and len(lit.args) == 1 and lit.functor in ("checked", "false"):
            err(
                rr.span_of(lit),
                f"program-point assertions cannot have status '{lit.functor}'",
            )


def _check_prop_definitions(m: SourceModule) -> None:
    defined = set()
    for c in m.clauses:
        name, arity = functor_arity(c.head)
        defined.add(f"{name}/{arity}")
    imported_all = any(r is None for _, r in m.imports)
    imported = {f"{n}/{a}" for _, r in m.imports if r for n, a in r}
    for pd in m.prop_decls:
        if pd.pred not in defined and pd.pred not in imported and not imported_all:
            m.parse_errors.append(
                Diagnostic(
                    m.path,
                    pd.span,
                    "warning",
                    f"property {pd.pred} has no defining clauses and is not imported",
                    "prop",
                )
            )
