"""Term and module rendering.

Output reparses to a structurally equal term (the round-trip law), which
also makes it usable as a canonical text for content hashing.
"""

from __future__ import annotations

from fractions import Fraction

from ..terms import Atom, Num, Struct, Term, Var, list_parts
from .reader import INFIX, PREFIX

_IDENT_OK = set("abcdefghijklmnopqrstuvwxyz")
_SYMBOLIC = set("+-*/\\^<>=~:.?@#&$")


def atom_text(name: str) -> str:
    if not name:
        return "''"
    c = name[0]
    if c in _IDENT_OK and all(ch == "_" or ch.isalnum() for ch in name):
        return name
    if all(ch in _SYMBOLIC for ch in name) and name != ".":
        return name
    if name in ("[]", "{}", "!", ";"):
        return name
    escaped = name.replace("\\", "\\\\").replace("'", "\\'")
    return f"'{escaped}'"


def format_term(t: Term, maxprec: int = 1200) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Num):
        if isinstance(t.value, Fraction) and t.value.denominator != 1:
            return str(float(t.value))
        return str(int(t.value))
    if isinstance(t, Atom):
        return atom_text(t.name)
    assert isinstance(t, Struct)
    if t.functor == "." and len(t.args) == 2:
        items, tail = list_parts(t)
        inner = ",".join(format_term(a, 999) for a in items)
        if isinstance(tail, Atom) and tail.name == "[]":
            return f"[{inner}]"
        return f"[{inner}|{format_term(tail, 999)}]"
    if t.functor == "{}" and len(t.args) == 1:
        return "{" + format_term(t.args[0], 1200) + "}"
    if len(t.args) == 2 and t.functor in INFIX:
        prec, typ = INFIX[t.functor]
        lmax = prec - 1 if typ[0] == "x" else prec
        rmax = prec - 1 if typ[2] == "x" else prec
        sep = "," if t.functor == "," else f" {t.functor} "
        body = f"{format_term(t.args[0], lmax)}{sep}{format_term(t.args[1], rmax)}"
        return f"({body})" if prec > maxprec else body
    if len(t.args) == 1 and t.functor in PREFIX and t.functor not in ("-", "+"):
        prec, typ = PREFIX[t.functor]
        amax = prec - 1 if typ[1] == "x" else prec
        body = f"{t.functor} {format_term(t.args[0], amax)}"
        return f"({body})" if prec > maxprec else body
    args = ",".join(format_term(a, 999) for a in t.args)
    return f"{atom_text(t.functor)}({args})"


def format_goal_list(goals: list[Term] | tuple[Term, ...]) -> str:
    return ", ".join(format_term(g, 999) for g in goals)


def _formula_text(formula: tuple[Term, ...]) -> str:
    if not formula:
        return "true"
    if len(formula) == 1:
        return format_term(formula[0], 974)
    return "(" + ",".join(format_term(t, 999) for t in formula) + ")"


def format_assertion(a) -> str:
    parts = [format_term(a.head, 977)]
    if a.pre:
        parts.append(f": {_formula_text(a.pre)}")
    if a.post:
        parts.append(f"=> {_formula_text(a.post)}")
    if a.comp:
        parts.append(f"+ {_formula_text(a.comp)}")
    status = "" if a.status == "check" else f"{a.status} "
    return f":- {status}pred {' '.join(parts)}."


def format_body_lit(lit) -> str:
    from .ast import CallLit

    if isinstance(lit, CallLit):
        return format_term(lit.goal, 999)
    inner = ",".join(format_term(f, 999) for f in lit.formula) or "true"
    wrapped = inner if len(lit.formula) == 1 else f"({inner})"
    return f"{lit.status}({wrapped})"


def format_clause(c) -> str:
    head = format_term(c.head, 1199)
    if not c.body:
        return f"{head}."
    body = ", ".join(format_body_lit(lit) for lit in c.body)
    return f"{head} :-\n    {body}."


def format_hc_module(m) -> str:
    """Render a normalized module back to loadable text (used by the
    run-time check annotator's output)."""
    out: list[str] = []
    exports = "[" + ",".join(m.exports) + "]"
    out.append(f":- module({atom_text(m.name)}, {exports}, [assertions]).")
    for name, restriction in m.imports:
        if restriction is None:
            out.append(f":- use_module({atom_text(name)}).")
        else:
            out.append(f":- use_module({atom_text(name)}, [{','.join(restriction)}]).")
    for pd in m.prop_decls:
        kw = "regtype" if pd.is_regtype else "prop"
        out.append(f":- {kw} {atom_text(pd.name)}/{pd.arity}.")
    for e in m.entries:
        pre = f" : {_formula_text(e.pre)}" if e.pre else ""
        out.append(f":- entry {format_term(e.head, 977)}{pre}.")
    for a in m.assertions:
        out.append(format_assertion(a))
    for pred in m.preds:
        out.append("")
        for c in m.preds[pred]:
            out.append(format_clause(c))
    return "\n".join(out) + "\n"


def pretty_module(m) -> str:
    """Render a SourceModule back to reparseable text (canonical layout)."""
    out: list[str] = []
    exports = "_" if m.exports is None else "[" + ",".join(f"{n}/{a}" for n, a in m.exports) + "]"
    packages = "[" + ",".join(m.packages) + "]"
    out.append(f":- module({atom_text(m.name)}, {exports}, {packages}).")
    for name, restriction in m.imports:
        if restriction is None:
            out.append(f":- use_module({atom_text(name)}).")
        else:
            imps = ",".join(f"{n}/{a}" for n, a in restriction)
            out.append(f":- use_module({atom_text(name)}, [{imps}]).")
    for pd in m.prop_decls:
        kw = "regtype" if pd.is_regtype else "prop"
        out.append(f":- {kw} {atom_text(pd.name)}/{pd.arity}.")
    for e in m.entries:
        pre = f" : {_formula_text(e.pre)}" if e.pre else ""
        out.append(f":- entry {format_term(e.head, 977)}{pre}.")
    for a in m.assertions:
        out.append(format_assertion(a))
    for c in m.clauses:
        head = format_term(c.head, 1199)
        if c.body is None:
            out.append(f"{head}.")
        else:
            out.append(f"{head} :- {format_term(c.body, 1199)}.")
    return "\n".join(out) + "\n"
