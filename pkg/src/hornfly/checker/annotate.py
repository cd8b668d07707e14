"""Run-time check instrumentation for unresolved conditions.

Every predicate with a condition still at status check gets wrapped: its
clauses move to a `$impl`-suffixed predicate and a fresh wrapper clause
checks the calls condition on entry (rtcheck_pre) and each applicable
success condition on exit (rtcheck_post). Properties are runnable, so
the rtcheck literals execute them directly under the oracle
interpreter. Comp conditions are not instrumented (their properties are
not state formulas).
"""

from __future__ import annotations

from ..frontend.ast import (
    CallLit,
    Clause,
    ClauseId,
    HcModule,
    PropFormula,
    conj_term,
    content_hash,
)
from ..frontend.lexer import ZERO_SPAN
from ..frontend.pretty import format_term
from ..terms import Atom, Struct, Term, Var, canonical_term, mklist
from .conditions import CallsCond, SuccessCond
from .verdicts import CHECK, CheckVerdict

IMPL_SUFFIX = "$impl"


def annotate_runtime_checks(m: HcModule, verdicts: list[CheckVerdict]) -> HcModule:
    pending: dict[str, dict] = {}
    for v in verdicts:
        if v.status != CHECK or v.condition is None:
            continue
        c = v.condition
        module, pred = c.pred.split(":", 1)
        if module != m.name or pred not in m.preds:
            continue
        slot = pending.setdefault(pred, {"calls": None, "successes": []})
        if isinstance(c, CallsCond):
            slot["calls"] = c
        elif isinstance(c, SuccessCond):
            slot["successes"].append(c)

    pending = {k: s for k, s in pending.items() if s["calls"] or s["successes"]}
    if not pending:
        return m

    preds: dict[str, tuple[Clause, ...]] = {}
    for pred, clauses in m.preds.items():
        if pred not in pending:
            preds[pred] = clauses
            continue
        name, arity_s = pred.rsplit("/", 1)
        arity = int(arity_s)
        impl_name = name + IMPL_SUFFIX
        impl_pred = f"{impl_name}/{arity}"
        impl_clauses = []
        for c in clauses:
            head = c.head
            if isinstance(head, Struct):
                head = Struct(impl_name, head.args)
            else:
                head = Atom(impl_name)
            impl_clauses.append(
                Clause(
                    ClauseId(m.name, impl_pred, c.id.hash, c.id.ordinal), head, c.body, c.span
                )
            )
        preds[impl_pred] = tuple(impl_clauses)
        preds[pred] = (_wrapper_clause(m.name, pred, pending[pred]),)
    return HcModule(
        name=m.name,
        path=m.path,
        exports=m.exports,
        imports=m.imports,
        preds=preds,
        assertions=m.assertions,
        entries=m.entries,
        prop_decls=m.prop_decls,
    )


def _wrapper_clause(module: str, pred: str, slot: dict) -> Clause:
    name, arity_s = pred.rsplit("/", 1)
    arity = int(arity_s)
    args = tuple(Var(f"A{i}") for i in range(arity))
    head: Term = Struct(name, args) if arity else Atom(name)
    body: list[CallLit] = []

    calls: CallsCond | None = slot["calls"]
    if calls is not None:
        ren = _onto(calls.head, args)
        disjuncts = mklist([_formula_term(_rename_f(d, ren)) for d in calls.pre_disjuncts])
        body.append(CallLit(Struct("rtcheck_pre", (disjuncts,)), ZERO_SPAN))

    impl_goal: Term = Struct(name + IMPL_SUFFIX, args) if arity else Atom(name + IMPL_SUFFIX)
    body.append(CallLit(impl_goal, ZERO_SPAN))

    for sc in slot["successes"]:
        ren = _onto(sc.head, args)
        body.append(
            CallLit(
                Struct(
                    "rtcheck_post",
                    (_formula_term(_rename_f(sc.pre, ren)), _formula_term(_rename_f(sc.post, ren))),
                ),
                ZERO_SPAN,
            )
        )

    text = format_term(canonical_term(Struct("$wrap", (head,) + tuple(l.goal for l in body))))
    cid = ClauseId(module, pred, content_hash(text), 0)
    return Clause(cid, head, tuple(body), ZERO_SPAN)


def _onto(head: Term, args: tuple[Var, ...]) -> dict[Var, Term]:
    hv = head.args if isinstance(head, Struct) else ()
    return {v: a for v, a in zip(hv, args) if isinstance(v, Var)}


def _rename_f(formula: PropFormula, mapping) -> PropFormula:
    from ..terms import rename_term

    return tuple(rename_term(t, mapping) for t in formula)


def _formula_term(formula: PropFormula) -> Term:
    return conj_term(formula)
