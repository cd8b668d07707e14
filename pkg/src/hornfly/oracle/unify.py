"""Substitutions and most-general unification with occurs check."""

from __future__ import annotations

from ..terms import Atom, Num, Struct, Term, Var

Subst = dict[Var, Term]


def walk(t: Term, s: Subst) -> Term:
    while isinstance(t, Var):
        nxt = s.get(t)
        if nxt is None:
            return t
        t = nxt
    return t


def resolve(t: Term, s: Subst) -> Term:
    t = walk(t, s)
    if isinstance(t, Struct):
        return Struct(t.functor, tuple(resolve(a, s) for a in t.args))
    return t


def occurs(v: Var, t: Term, s: Subst) -> bool:
    t = walk(t, s)
    if isinstance(t, Var):
        return t == v
    if isinstance(t, Struct):
        return any(occurs(v, a, s) for a in t.args)
    return False


def unify(a: Term, b: Term, s: Subst) -> Subst | None:
    """Returns an extended substitution or None. The input dict is not
    mutated; bindings are layered copy-on-write."""
    stack = [(a, b)]
    out: Subst | None = None

    def bind(v: Var, t: Term) -> bool:
        nonlocal out, s
        if occurs(v, t, s):
            return False
        if out is None:
            out = dict(s)
            s = out
        out[v] = t
        return True

    while stack:
        x, y = stack.pop()
        x = walk(x, s)
        y = walk(y, s)
        if x == y:
            continue
        if isinstance(x, Var):
            if not bind(x, y):
                return None
            continue
        if isinstance(y, Var):
            if not bind(y, x):
                return None
            continue
        if isinstance(x, Atom) and isinstance(y, Atom):
            return None  # unequal (equal handled above)
        if isinstance(x, Num) and isinstance(y, Num):
            return None
        if isinstance(x, Struct) and isinstance(y, Struct):
            if x.functor != y.functor or len(x.args) != len(y.args):
                return None
            stack.extend(zip(x.args, y.args))
            continue
        return None
    return s if out is None else out
