"""Property formulas and their per-domain approximations.

The table maps property predicates to abstraction rules. Over- and
under-approximations default to top and bottom for anything unknown, so
precision degrades before soundness does. Regtype grammars are extracted
from the properties' own defining clauses; non-regtype properties can be
given a regtype over-approximation via a trust assertion on them
(``:- trust pred sorted(X) => list(X).``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from ..frontend.ast import CallLit, Clause, HcModule, PropFormula
from ..terms import Atom, Num, Struct, Term, Var, functor_arity, term_vars
from .base import BOTTOM, AbstractDomain
from .modes import ModesDomain
from .pairsh import PairShDomain
from .regtypes import (
    ANY,
    ATM,
    NUM,
    VART,
    RBuiltin,
    RegTypesDomain,
    RNamed,
    SAtom,
    SNum,
    SParam,
    SStruct,
    Shape,
    TypeEnv,
    TypeRef,
)
from .. import kernels

BUILTIN_TYPE_PROPS: dict[str, TypeRef] = {
    "num/1": NUM,
    "number/1": NUM,
    "int/1": NUM,
    "flt/1": NUM,
    "atm/1": ATM,
    "atom/1": ATM,
}

MODE_PROPS = {"ground/1", "var/1", "nonvar/1", "gnd/1"}


@dataclass(slots=True)
class PropInfo:
    pred: str
    is_regtype: bool
    over_posts: list[tuple[Term, PropFormula]] = field(default_factory=list)  # (head, post)


class PropTable:
    def __init__(self) -> None:
        self.env = TypeEnv()
        self.props: dict[str, PropInfo] = {}
        self.unknown_seen: set[str] = set()

    # -- construction ---------------------------------------------------

    def add_module(self, m: HcModule) -> None:
        for pd in m.prop_decls:
            info = self.props.setdefault(pd.pred, PropInfo(pd.pred, pd.is_regtype))
            info.is_regtype = info.is_regtype or pd.is_regtype
        for a in m.assertions:
            if a.status == "trust" and a.post:
                key = a.pred
                if key in self.props:
                    self.props[key].over_posts.append((a.head, a.post))
        for pd in m.prop_decls:
            if pd.is_regtype and pd.pred in m.preds:
                self._define_grammar(pd.pred, m.preds[pd.pred])

    def _define_grammar(self, pred: str, clauses: tuple[Clause, ...]) -> None:
        name, arity = pred.split("/")
        nparams = int(arity) - 1
        alts: list[Shape] = []
        for c in clauses:
            alt = self._clause_alternative(c, nparams)
            if alt is not None:
                alts.append(alt)
        if alts:
            self.env.define(pred, nparams, alts)

    def _clause_alternative(self, c: Clause, nparams: int) -> Shape | None:
        """One regtype clause contributes one grammar alternative: the shape
        of the last head argument, with leaf variables typed by the body's
        property literals."""
        if not isinstance(c.head, Struct):
            return None
        head_args = list(c.head.args)
        params = head_args[:nparams]
        param_index: dict[str, int] = {}
        for i, p in enumerate(params):
            if isinstance(p, Var):
                param_index[p.name] = i

        # The normalizer may have split the subject into `_An = term`.
        subject: Term = head_args[-1]
        bindings: dict[str, Term] = {}
        var_types: dict[str, Shape] = {}
        for lit in c.body:
            if not isinstance(lit, CallLit):
                continue
            goal = lit.goal
            if isinstance(goal, Struct) and goal.functor == "=" and len(goal.args) == 2:
                lhs, rhs = goal.args
                if isinstance(lhs, Var):
                    bindings[lhs.name] = rhs
                continue
            ty = self._typing_literal(goal, param_index)
            if ty is not None:
                var_name, tref = ty
                var_types.setdefault(var_name, tref)
        while isinstance(subject, Var) and subject.name in bindings:
            subject = bindings[subject.name]
        return self._shape_from(subject, var_types)

    def _typing_literal(self, goal: Term, param_index: dict[str, int]) -> tuple[str, Shape] | None:
        if not isinstance(goal, Struct):
            return None
        if goal.functor == "call" and len(goal.args) == 2:
            p, v = goal.args
            if isinstance(p, Var) and isinstance(v, Var) and p.name in param_index:
                return v.name, SParam(param_index[p.name])
            return None
        if not goal.args or not isinstance(goal.args[-1], Var):
            return None
        subject = goal.args[-1]
        key = f"{goal.functor}/{len(goal.args)}"
        if key in BUILTIN_TYPE_PROPS:
            return subject.name, BUILTIN_TYPE_PROPS[key]
        if key in self.props and self.props[key].is_regtype:
            params = tuple(self._param_ref(p, param_index) for p in goal.args[:-1])
            return subject.name, RNamed(key, params)
        return None

    def _param_ref(self, t: Term, param_index: dict[str, int]) -> TypeRef:
        if isinstance(t, Var) and t.name in param_index:
            return SParam(param_index[t.name])  # type: ignore[return-value]
        return self.type_expr(t)

    def _shape_from(self, t: Term, var_types: dict[str, Shape]) -> Shape:
        if isinstance(t, Var):
            return var_types.get(t.name, ANY)
        if isinstance(t, Atom):
            return SAtom(t.name)
        if isinstance(t, Num):
            return SNum(t.value)
        assert isinstance(t, Struct)
        return SStruct(t.functor, tuple(self._shape_from(a, var_types) for a in t.args))

    # -- type expressions in assertion formulas --------------------------

    def type_expr(self, t: Term) -> TypeRef:
        """A parameter position in a property literal, e.g. the `num` in
        `list(num, A)` or `list(list(num), A)`."""
        if isinstance(t, Var):
            return ANY
        if isinstance(t, Atom):
            key = f"{t.name}/1"
            if key in BUILTIN_TYPE_PROPS:
                return BUILTIN_TYPE_PROPS[key]
            if key in self.props and self.props[key].is_regtype:
                return RNamed(key)
            return ANY
        if isinstance(t, Struct):
            key = f"{t.functor}/{len(t.args) + 1}"
            if key in self.props and self.props[key].is_regtype:
                return RNamed(key, tuple(self.type_expr(a) for a in t.args))
        return ANY

    # -- groundness/nonvar implications of regtypes ----------------------

    def implies_ground(self, tref: TypeRef) -> bool:
        return self._implies(tref, ground=True, assume=set())

    def implies_nonvar(self, tref: TypeRef) -> bool:
        return self._implies(tref, ground=False, assume=set())

    def _implies(self, s: Shape, ground: bool, assume: set) -> bool:
        if isinstance(s, (SNum, SAtom)):
            return True
        if isinstance(s, RBuiltin):
            return s.name in ("num", "atm")
        if isinstance(s, RNamed):
            if s in assume:
                return True
            alts = self.env.alts_of(s)
            if not alts:
                return False
            assume = assume | {s}
            return all(self._implies(a, ground, assume) for a in alts)
        if isinstance(s, SStruct):
            if not ground:
                return True
            return all(self._implies(c, True, assume) for c in s.children)
        return False


# -- alpha: formulas into domains ---------------------------------------


class Alpha:
    """I+ / I- : property formulas into one abstract domain."""

    def __init__(self, table: PropTable):
        self.table = table

    def over(self, domain: AbstractDomain, formula: PropFormula, vars: Sequence[str]):
        val = domain.top(vars)
        for lit in formula:
            c = self._over_literal(domain, lit, vars)
            if c is BOTTOM:
                return BOTTOM
            val = domain.refine(val, c)
            if domain.is_bottom(val):
                return BOTTOM
        return val

    def under(self, domain: AbstractDomain, formula: PropFormula, vars: Sequence[str]):
        val = domain.top(vars)
        for lit in formula:
            c = self._under_literal(domain, lit, vars)
            if c is BOTTOM:
                return BOTTOM
            val = domain.glb(val, c)
            if domain.is_bottom(val):
                return BOTTOM
        return val

    # -- helpers --------------------------------------------------------

    def _subject(self, lit: Term) -> Var | None:
        if isinstance(lit, Struct) and lit.args and isinstance(lit.args[-1], Var):
            return lit.args[-1]
        return None

    def _over_literal(self, domain: AbstractDomain, lit: Term, vars: Sequence[str]):
        name, arity = functor_arity(lit)
        key = f"{name}/{arity}"
        if isinstance(domain, ModesDomain):
            return self._modes_literal(domain, lit, key, vars, over=True)
        if isinstance(domain, PairShDomain):
            return self._pairsh_literal(domain, lit, key, vars, over=True)
        if isinstance(domain, RegTypesDomain):
            return self._regtypes_literal(domain, lit, key, vars, over=True)
        return domain.top(vars)

    def _under_literal(self, domain: AbstractDomain, lit: Term, vars: Sequence[str]):
        name, arity = functor_arity(lit)
        key = f"{name}/{arity}"
        if isinstance(domain, ModesDomain):
            return self._modes_literal(domain, lit, key, vars, over=False)
        if isinstance(domain, PairShDomain):
            return self._pairsh_literal(domain, lit, key, vars, over=False)
        if isinstance(domain, RegTypesDomain):
            return self._regtypes_literal(domain, lit, key, vars, over=False)
        return BOTTOM

    def _regtype_over_of(self, key: str, _visiting: frozenset = frozenset()) -> TypeRef | None:
        """Over-approximation of a property as a TypeRef, if registered."""
        table = self.table
        if key in BUILTIN_TYPE_PROPS:
            return BUILTIN_TYPE_PROPS[key]
        if key in _visiting:
            return None
        info = table.props.get(key)
        if info is None:
            return None
        if info.is_regtype:
            return RNamed(key)
        for head, post in info.over_posts:
            if not isinstance(head, Struct) or not isinstance(head.args[-1], Var):
                continue
            subject = head.args[-1]
            for plit in post:
                if not (isinstance(plit, Struct) and plit.args and plit.args[-1] == subject):
                    continue
                pkey = f"{plit.functor}/{len(plit.args)}"
                base = self._regtype_over_of(pkey, _visiting | {key})
                if base is None:
                    continue
                if isinstance(base, RNamed) and len(plit.args) > 1:
                    params = tuple(table.type_expr(a) for a in plit.args[:-1])
                    base = RNamed(base.key, params)
                return base
        return None

    # -- modes ----------------------------------------------------------

    def _modes_literal(self, domain: ModesDomain, lit: Term, key: str, vars, over: bool):
        top = domain.top(vars)
        codes = bytearray(top.codes)
        index = top._index

        def setm(name: str, code: int):
            codes[index[name]] = code

        if key in ("ground/1", "gnd/1"):
            arg = lit.args[0]
            for v in term_vars(arg):
                setm(v.name, kernels.GROUND)
            return domain._mk(top.vars, codes)
        if key == "var/1":
            arg = lit.args[0]
            if isinstance(arg, Var):
                setm(arg.name, kernels.FREE)
                return domain._mk(top.vars, codes)
            return BOTTOM  # a structured term is never a free variable
        if key == "nonvar/1":
            arg = lit.args[0]
            if isinstance(arg, Var):
                setm(arg.name, kernels.NONVAR)
                return domain._mk(top.vars, codes)
            return top if over else domain.top(vars)  # always true
        if not over:
            return BOTTOM
        subj = self._subject(lit)
        tref = self._regtype_over_of(key)
        if subj is not None and tref is not None:
            if self.table.implies_ground(tref):
                setm(subj.name, kernels.GROUND)
            elif self.table.implies_nonvar(tref):
                setm(subj.name, kernels.NONVAR)
            return domain._mk(top.vars, codes)
        self.table.unknown_seen.add(key)
        return top

    # -- pairsh ----------------------------------------------------------

    def _pairsh_literal(self, domain: PairShDomain, lit: Term, key: str, vars, over: bool):
        top = domain.top(vars)
        index = top._index

        if key in ("ground/1", "gnd/1"):
            mask = 0
            for v in term_vars(lit.args[0]):
                mask |= 1 << index[v.name]
            return domain._mk(top.vars, (mask, top.free, top.share))
        if key == "indep/2":
            a, b = lit.args
            if isinstance(a, Var) and isinstance(b, Var) and a.name != b.name:
                i, j = index[a.name], index[b.name]
                share = list(top.share)
                share[i] &= ~(1 << j)
                share[j] &= ~(1 << i)
                return domain._mk(top.vars, (top.ground, top.free, tuple(share)))
            return top if over else BOTTOM
        if key == "nonvar/1" and isinstance(lit.args[0], Var):
            i = index[lit.args[0].name]
            return domain._mk(top.vars, (top.ground, top.free & ~(1 << i), top.share))
        if key == "var/1":
            if not isinstance(lit.args[0], Var):
                return BOTTOM
            return top if over else BOTTOM
        if not over:
            return BOTTOM
        subj = self._subject(lit)
        tref = self._regtype_over_of(key)
        if subj is not None and tref is not None:
            i = index[subj.name]
            if self.table.implies_ground(tref):
                return domain._mk(top.vars, (1 << i, top.free, top.share))
            if self.table.implies_nonvar(tref):
                return domain._mk(top.vars, (top.ground, top.free & ~(1 << i), top.share))
            return top
        self.table.unknown_seen.add(key)
        return top

    # -- regtypes ---------------------------------------------------------

    def _regtypes_literal(self, domain: RegTypesDomain, lit: Term, key: str, vars, over: bool):
        top = domain.top(vars)
        types = list(top.types)
        index = top._index

        if key == "var/1":
            arg = lit.args[0]
            if isinstance(arg, Var):
                types[index[arg.name]] = VART
                return domain._mk(top.vars, types)
            return BOTTOM
        if key in ("ground/1", "gnd/1", "nonvar/1", "indep/2"):
            return top if over else BOTTOM

        subj = self._subject(lit)
        if subj is not None:
            tref: TypeRef | None = None
            if key in BUILTIN_TYPE_PROPS:
                tref = BUILTIN_TYPE_PROPS[key]
            else:
                info = self.table.props.get(key)
                if info is not None and info.is_regtype:
                    params = tuple(self.table.type_expr(a) for a in lit.args[:-1])
                    tref = RNamed(key, params)
                elif over:
                    tref = self._regtype_over_of(key)
            if tref is not None:
                types[index[subj.name]] = tref
                return domain._mk(top.vars, types)
        if not over:
            return BOTTOM
        self.table.unknown_seen.add(key)
        return top
