"""SourceModule -> HcModule: head flattening, clause identity, body literals."""

from __future__ import annotations

from ..terms import Atom, Struct, Term, Var, canonical_term, functor_arity
from .ast import (
    BodyLit,
    CallLit,
    Clause,
    ClauseId,
    HcModule,
    PP_STATUSES,
    PpLit,
    SourceClause,
    SourceModule,
    content_hash,
    flatten_conj,
)
from .pretty import format_term


def normalize(m: SourceModule) -> HcModule:
    preds: dict[str, list[Clause]] = {}
    hash_counts: dict[tuple[str, str], int] = {}

    for sc in m.clauses:
        head, body = _normalize_clause(sc)
        name, arity = functor_arity(head)
        pred = f"{name}/{arity}"
        chash = _clause_hash(head, body)
        ordinal = hash_counts.get((pred, chash), 0)
        hash_counts[(pred, chash)] = ordinal + 1
        cid = ClauseId(m.name, pred, chash, ordinal)
        preds.setdefault(pred, []).append(Clause(cid, head, body, sc.span))

    exports = sorted(preds) if m.exports is None else [f"{n}/{a}" for n, a in m.exports]
    imports = [
        (name, None if r is None else [f"{n}/{a}" for n, a in r]) for name, r in m.imports
    ]
    return HcModule(
        name=m.name,
        path=m.path,
        exports=exports,
        imports=imports,
        preds={k: tuple(v) for k, v in preds.items()},
        assertions=tuple(m.assertions),
        entries=tuple(m.entries),
        prop_decls=tuple(m.prop_decls),
    )


def _normalize_clause(sc: SourceClause) -> tuple[Term, tuple[BodyLit, ...]]:
    """Flatten the head to a descriptor over distinct variables; argument
    structure moves into leading unifications."""
    head = sc.head
    lits: list[BodyLit] = []
    if isinstance(head, Struct):
        new_args: list[Term] = []
        seen: set[Var] = set()
        for i, arg in enumerate(head.args):
            if isinstance(arg, Var) and arg not in seen:
                seen.add(arg)
                new_args.append(arg)
                continue
            v = Var(f"_A{i}")
            seen.add(v)
            new_args.append(v)
            lits.append(CallLit(Struct("=", (v, arg)), sc.span_of(arg)))
        head = Struct(head.functor, tuple(new_args))

    if sc.body is not None:
        for goal in flatten_conj(sc.body):
            lits.append(_body_literal(goal, sc))
    return head, tuple(lits)


def _body_literal(goal: Term, sc: SourceClause) -> BodyLit:
    span = sc.span_of(goal)
    if isinstance(goal, Struct) and len(goal.args) == 1 and goal.functor in PP_STATUSES:
        formula = tuple(flatten_conj(goal.args[0]))
        return PpLit(goal.functor, formula, span)
    return CallLit(goal, span)


def _clause_hash(head: Term, body: tuple[BodyLit, ...]) -> str:
    from .ast import conj_term

    parts: list[Term] = [head]
    for lit in body:
        if isinstance(lit, CallLit):
            parts.append(lit.goal)
        else:
            parts.append(Struct("$pp", (Atom(lit.status), conj_term(lit.formula))))
    canon = canonical_term(Struct("$clause", tuple(parts)))
    return content_hash(format_term(canon))
