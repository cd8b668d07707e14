"""Goal-dependent analysis plumbing, generic over the domain plug-in.

Call patterns are canonicalized by projecting onto positional argument
variables, so structurally equal calling contexts share one graph node
regardless of source variable names.
"""

from __future__ import annotations

from typing import Any, Sequence

from ..terms import Atom, Num, Struct, Term, Var
from .base import BOTTOM, AbstractDomain


def unify_terms(domain: AbstractDomain, val: Any, a: Term, b: Term) -> Any:
    """Transfer of `a = b`: decomposes structure down to amgu steps."""
    if domain.is_bottom(val):
        return BOTTOM
    if isinstance(a, Var):
        return domain.amgu(val, a, b)
    if isinstance(b, Var):
        return domain.amgu(val, b, a)
    if isinstance(a, Atom) and isinstance(b, Atom):
        return val if a.name == b.name else BOTTOM
    if isinstance(a, Num) and isinstance(b, Num):
        return val if a.value == b.value else BOTTOM
    if isinstance(a, Struct) and isinstance(b, Struct):
        if a.functor != b.functor or len(a.args) != len(b.args):
            return BOTTOM
        for x, y in zip(a.args, b.args):
            val = unify_terms(domain, val, x, y)
            if domain.is_bottom(val):
                return BOTTOM
        return val
    return BOTTOM


def _arg_names(prefix: str, n: int) -> list[str]:
    return [f"${prefix}{i}" for i in range(n)]


def goal_args(goal: Term) -> tuple[Term, ...]:
    if isinstance(goal, Struct):
        return goal.args
    return ()


def project_call(domain: AbstractDomain, state: Any, goal: Term) -> Any:
    """Canonical call-pattern payload for a body goal under `state`."""
    args = goal_args(goal)
    names = _arg_names("c", len(args))
    joint = domain.combine(state, domain.fresh(names))
    for name, arg in zip(names, args):
        joint = unify_terms(domain, joint, Var(name), arg)
        if domain.is_bottom(joint):
            return "bottom"
    proj = domain.restrict(joint, names)
    return domain.to_key(proj, names)


def entry_value(domain: AbstractDomain, payload: Any, clause_head: Term) -> Any:
    """λc payload transported onto a normalized clause head (pure renaming)."""
    args = goal_args(clause_head)
    names = [a.name for a in args if isinstance(a, Var)]
    assert len(names) == len(args), "normalized clause heads are variable-only"
    return domain.from_key(payload, names)


def extend_with_success(
    domain: AbstractDomain, state: Any, goal: Term, success_payload: Any
) -> Any:
    """Conjoin a callee success pattern into the caller state."""
    if domain.is_bottom(state):
        return BOTTOM
    args = goal_args(goal)
    names = _arg_names("r", len(args))
    succ = domain.from_key(success_payload, names)
    if domain.is_bottom(succ):
        return BOTTOM
    keep = domain.vars_of(state)
    joint = domain.combine(state, succ)
    for name, arg in zip(names, args):
        joint = unify_terms(domain, joint, Var(name), arg)
        if domain.is_bottom(joint):
            return BOTTOM
    return domain.restrict(joint, keep)


def exit_payload(domain: AbstractDomain, state: Any, clause_head: Term) -> Any:
    """Clause exit state -> canonical λs payload over head positions."""
    args = goal_args(clause_head)
    names = [a.name for a in args if isinstance(a, Var)]
    proj = domain.restrict(state, names)
    return domain.to_key(proj, names)


def rename_payload_onto(domain: AbstractDomain, payload: Any, goal: Term) -> Any:
    """Payload expressed over a query descriptor's own variables."""
    args = goal_args(goal)
    names = [a.name for a in args if isinstance(a, Var)]
    if len(names) != len(args):
        raise ValueError("goal must be a descriptor with distinct variables")
    return domain.from_key(payload, names)


def top_payload(domain: AbstractDomain, arity: int) -> Any:
    names = _arg_names("c", arity)
    return domain.to_key(domain.top(names), names)


def payload_leq(domain: AbstractDomain, a: Any, b: Any, arity: int) -> bool:
    names = _arg_names("c", arity)
    return domain.leq(domain.from_key(a, names), domain.from_key(b, names))


def payload_lub(domain: AbstractDomain, a: Any, b: Any, arity: int) -> Any:
    names = _arg_names("c", arity)
    v = domain.lub(domain.from_key(a, names), domain.from_key(b, names))
    return domain.to_key(v, names)
