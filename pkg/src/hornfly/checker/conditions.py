"""Assertion conditions: the proof obligations derived from assertions.

For a predicate with check-assertions {a1..an} there is exactly one
calls condition (the disjunction of all preconditions) plus one success
condition per assertion with a postcondition and one comp condition per
assertion with a computational field. true/trust assertions feed the
analyzer instead and are never checked; checked/false statuses are
re-derived from scratch on every run.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..frontend.ast import Assertion, PropFormula
from ..frontend.lexer import Span
from ..terms import Struct, Term, Var, functor_arity

CHECKABLE = ("check", "checked", "false")


@dataclass(frozen=True, slots=True)
class CallsCond:
    pred: str  # qualified
    head: Term
    pre_disjuncts: tuple[PropFormula, ...]
    sources: tuple[tuple[str, Assertion], ...]  # (defining module, assertion)

    @property
    def kind(self) -> str:
        return "calls"

    @property
    def span(self) -> Span:
        return self.sources[0][1].span

    @property
    def module(self) -> str:
        return self.sources[0][0]

    def cid(self) -> str:
        return f"calls:{self.pred}"


@dataclass(frozen=True, slots=True)
class SuccessCond:
    pred: str
    head: Term
    pre: PropFormula
    post: PropFormula
    source: tuple[str, Assertion]

    @property
    def kind(self) -> str:
        return "success"

    @property
    def span(self) -> Span:
        return self.source[1].span

    @property
    def module(self) -> str:
        return self.source[0]

    def cid(self) -> str:
        return f"success:{self.pred}:{self.source[1].id}"


@dataclass(frozen=True, slots=True)
class CompCond:
    pred: str
    head: Term
    pre: PropFormula
    comp: PropFormula
    source: tuple[str, Assertion]

    @property
    def kind(self) -> str:
        return "comp"

    @property
    def span(self) -> Span:
        return self.source[1].span

    @property
    def module(self) -> str:
        return self.source[0]

    def cid(self) -> str:
        return f"comp:{self.pred}:{self.source[1].id}"


AssertionCondition = CallsCond | SuccessCond | CompCond


def build_conditions(
    qpred: str, assertions: list[tuple[str, Assertion]]
) -> list[AssertionCondition]:
    """All conditions for one predicate's assertion set."""
    contributing = [(m, a) for m, a in assertions if a.status in CHECKABLE]
    if not contributing:
        return []
    head = contributing[0][1].head
    head_vars = _head_vars(head)

    out: list[AssertionCondition] = []
    disjuncts: list[PropFormula] = []
    for m, a in contributing:
        disjuncts.append(_rename_onto(a.pre, a.head, head_vars))
    out.append(CallsCond(qpred, head, tuple(disjuncts), tuple(contributing)))

    for m, a in contributing:
        if a.post:
            out.append(
                SuccessCond(
                    qpred,
                    head,
                    _rename_onto(a.pre, a.head, head_vars),
                    _rename_onto(a.post, a.head, head_vars),
                    (m, a),
                )
            )
        if a.comp:
            out.append(
                CompCond(
                    qpred,
                    head,
                    _rename_onto(a.pre, a.head, head_vars),
                    _rename_onto(a.comp, a.head, head_vars),
                    (m, a),
                )
            )
    return out


def _head_vars(head: Term) -> tuple[Var, ...]:
    if isinstance(head, Struct):
        return tuple(a for a in head.args if isinstance(a, Var))
    return ()


def _rename_onto(formula: PropFormula, from_head: Term, to_vars: tuple[Var, ...]) -> PropFormula:
    mapping = dict(zip(_head_vars(from_head), to_vars))
    return tuple(_rename(t, mapping) for t in formula)


def _rename(t: Term, mapping) -> Term:
    if isinstance(t, Var):
        return mapping.get(t, t)
    if isinstance(t, Struct):
        return Struct(t.functor, tuple(_rename(a, mapping) for a in t.args))
    return t
