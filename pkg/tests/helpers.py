"""Test-side oracles: concrete abstraction and concretization membership.

These deliberately avoid the domain implementations they are used to
check: abstraction reads concrete substitutions directly, and regtype
membership runs the property's own clauses under the bounded
interpreter (with free variables frozen into opaque terms first).
"""

from __future__ import annotations

from hornfly import kernels
from hornfly.adomains.base import BOTTOM
from hornfly.adomains.modes import ModesDomain
from hornfly.adomains.pairsh import PairShDomain
from hornfly.adomains.regtypes import (
    RAny,
    RBuiltin,
    RNamed,
    RNone,
    RegTypesDomain,
    TypeRef,
)
from hornfly.oracle import Interpreter
from hornfly.oracle.unify import Subst, resolve, walk
from hornfly.terms import Atom, Num, Struct, Term, Var, is_ground, term_vars

FROZEN = "$fz"


def freeze_free_vars(t: Term) -> Term:
    """Replace free variables with opaque structs no grammar mentions."""
    if isinstance(t, Var):
        return Struct(FROZEN, (Num(99),))
    if isinstance(t, Struct):
        return Struct(t.functor, tuple(freeze_free_vars(a) for a in t.args))
    return t


def gamma_member(w, tref: TypeRef, t: Term) -> bool:
    """Is concrete term t in the concretization of tref?"""
    if isinstance(tref, RAny):
        return True
    if isinstance(tref, RNone):
        return False
    if isinstance(tref, RBuiltin):
        if tref.name == "var":
            return isinstance(t, Var)
        if isinstance(t, Var):
            return False
        if tref.name == "num":
            return isinstance(t, Num)
        return isinstance(t, Atom)
    assert isinstance(tref, RNamed)
    if isinstance(t, Var):
        return False
    name, _arity = tref.key.split("/")
    frozen = freeze_free_vars(t)
    goal_args = tuple(_type_to_term(p) for p in tref.params) + (frozen,)
    goal = Struct(name, goal_args)
    interp = Interpreter(w, 64, record=False)
    holds, decided = interp.provable(goal, {}, w.root)
    return holds and decided


def _type_to_term(tref: TypeRef) -> Term:
    if isinstance(tref, RAny):
        return Atom("is_term")  # runnable catch-all defined below in tests
    if isinstance(tref, RBuiltin):
        return Atom("num" if tref.name == "num" else "atm")
    if isinstance(tref, RNamed):
        name = tref.key.split("/")[0]
        if tref.params:
            return Struct(name, tuple(_type_to_term(p) for p in tref.params))
        return Atom(name)
    return Atom("is_term")


def abstract_subst_modes(domain: ModesDomain, names: list[str], s: Subst):
    code_by_name = {}
    for n in names:
        t = resolve(Var(n), s)
        if isinstance(t, Var):
            code_by_name[n] = kernels.FREE
        elif is_ground(t):
            code_by_name[n] = kernels.GROUND
        else:
            code_by_name[n] = kernels.NONVAR
    svars = tuple(sorted(names))
    return domain._mk(svars, bytes(code_by_name[n] for n in svars))


def abstract_subst_pairsh(domain: PairShDomain, names: list[str], s: Subst):
    svars = sorted(names)
    idx = {n: i for i, n in enumerate(svars)}
    ground = 0
    free = 0
    share = [0] * len(svars)
    resolved = {n: resolve(Var(n), s) for n in names}
    for n, t in resolved.items():
        if is_ground(t):
            ground |= 1 << idx[n]
        if isinstance(t, Var):
            free |= 1 << idx[n]
    for a in names:
        for b in names:
            if a >= b:
                continue
            va = set(term_vars(resolved[a]))
            vb = set(term_vars(resolved[b]))
            if va & vb:
                share[idx[a]] |= 1 << idx[b]
                share[idx[b]] |= 1 << idx[a]
    return domain._mk(tuple(svars), (ground, free, tuple(share)))


def modes_value_admits(domain: ModesDomain, val, names: list[str], s: Subst) -> bool:
    """Concrete membership for modes: sigma in gamma(val)?"""
    if val is BOTTOM:
        return False
    for n in names:
        t = resolve(Var(n), s)
        code = val.mode_of(n)
        if code == kernels.GROUND and not is_ground(t):
            return False
        if code == kernels.FREE and not isinstance(t, Var):
            return False
        if code == kernels.NONVAR and isinstance(t, Var):
            return False
    return True


def pairsh_value_admits(domain: PairShDomain, val, names: list[str], s: Subst) -> bool:
    if val is BOTTOM:
        return False
    resolved = {n: resolve(Var(n), s) for n in names}
    for n in names:
        i = val._index[n]
        t = resolved[n]
        if val.ground >> i & 1 and not is_ground(t):
            return False
        if not (val.free >> i & 1) and isinstance(t, Var):
            return False
    for a in names:
        for b in names:
            if a >= b:
                continue
            va = set(term_vars(resolved[a]))
            vb = set(term_vars(resolved[b]))
            if va & vb:
                i, j = val._index[a], val._index[b]
                if not (val.share[i] >> j & 1):
                    return False
    return True


def regtypes_value_admits(w, domain: RegTypesDomain, val, names: list[str], s: Subst) -> bool:
    if val is BOTTOM:
        return False
    for n in names:
        t = resolve(Var(n), s)
        if not gamma_member(w, val.type_of(n), t):
            return False
    return True
