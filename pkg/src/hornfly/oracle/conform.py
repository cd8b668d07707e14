"""Checking concrete traces against assertion conditions."""

from __future__ import annotations

from typing import Iterable, Sequence

from ..engine.workspace import Workspace
from ..frontend.ast import PropFormula
from ..terms import Struct, Term, Var, functor_arity
from .interp import Interpreter, Trace
from .unify import unify, resolve

CONSISTENT = "consistent"
VIOLATED = "violated"
UNKNOWN = "unknown"


def run_bounded(w: Workspace, query: Term, depth: int, module: str | None = None) -> list[Trace]:
    return [Interpreter(w, depth).run(query, module)]


def _bind_head(head: Term, goal: Term) -> dict | None:
    s = unify(head, goal, {})
    return s


def _eval_formula(
    interp: Interpreter, formula: PropFormula, s: dict, module: str
) -> tuple[bool, bool]:
    """(holds, decided) for a conjunction under bindings s."""
    all_decided = True
    for lit in formula:
        holds, decided = interp.provable(resolve(lit, s), {}, module)
        if not decided:
            all_decided = False
            continue
        if not holds:
            return False, True
    return True, all_decided


def check_calls_concrete(
    w: Workspace,
    head: Term,
    pres: Sequence[PropFormula],
    traces: Iterable[Trace],
    module: str,
    prop_depth: int = 64,
) -> tuple[str, Term | None]:
    """Violated iff some observed call fails every pre disjunct."""
    name, arity = functor_arity(head)
    pred = f"{name}/{arity}"
    interp = Interpreter(w, prop_depth, record=False)
    undecided = False
    for tr in traces:
        for goal in tr.calls_of(pred):
            s = _bind_head(head, goal)
            if s is None:
                continue
            any_holds = False
            any_undecided = False
            for pre in pres:
                holds, decided = _eval_formula(interp, pre, s, module)
                if holds and decided:
                    any_holds = True
                    break
                if not decided:
                    any_undecided = True
            if any_holds:
                continue
            if any_undecided:
                undecided = True
                continue
            return VIOLATED, goal
        if tr.truncated:
            undecided = True
    return (UNKNOWN if undecided else CONSISTENT), None


def check_success_concrete(
    w: Workspace,
    head: Term,
    pre: PropFormula,
    post: PropFormula,
    traces: Iterable[Trace],
    module: str,
    prop_depth: int = 64,
) -> tuple[str, Term | None]:
    """Violated iff a call satisfying pre succeeds with post failing."""
    name, arity = functor_arity(head)
    pred = f"{name}/{arity}"
    interp = Interpreter(w, prop_depth, record=False)
    undecided = False
    for tr in traces:
        for call_goal, success_goal in tr.call_success_pairs(pred):
            s_call = _bind_head(head, call_goal)
            if s_call is None:
                continue
            pre_holds, pre_decided = _eval_formula(interp, pre, s_call, module)
            if not pre_decided:
                undecided = True
                continue
            if not pre_holds:
                continue
            s_succ = _bind_head(head, success_goal)
            if s_succ is None:
                continue
            post_holds, post_decided = _eval_formula(interp, post, s_succ, module)
            if not post_decided:
                undecided = True
                continue
            if not post_holds:
                return VIOLATED, success_goal
        if tr.truncated:
            undecided = True
    return (UNKNOWN if undecided else CONSISTENT), None


def find_success_witness(
    w: Workspace,
    head: Term,
    pre: PropFormula,
    traces: Iterable[Trace],
    module: str,
    prop_depth: int = 64,
) -> Term | None:
    """A concrete succeeding call whose call state satisfied pre, if any."""
    name, arity = functor_arity(head)
    pred = f"{name}/{arity}"
    interp = Interpreter(w, prop_depth, record=False)
    for tr in traces:
        for call_goal, success_goal in tr.call_success_pairs(pred):
            s_call = _bind_head(head, call_goal)
            if s_call is None:
                continue
            holds, decided = _eval_formula(interp, pre, s_call, module)
            if holds and decided:
                return success_goal
    return None
