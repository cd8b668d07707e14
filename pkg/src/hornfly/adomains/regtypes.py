"""Regular-types domain over declared regtype grammars.

A variable's type is one of: none (empty), any, a builtin (num, atm, or
the free-variable marker), or a declared named type with type parameters.
Named types mean regular tree grammars extracted from their defining
clauses; ordering is decided by a memoized antichain-style simulation
between grammars. The domain never invents new grammars: joins climb to
the least declared supertype (or any) and widening collapses parameter
nesting past a fixed depth.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence

from ..terms import Atom, Num, Struct, Term, Var, term_vars
from .base import BOTTOM, AbstractDomain


# -- type references ---------------------------------------------------


@dataclass(frozen=True, slots=True)
class RAny:
    def __repr__(self) -> str:
        return "any"


@dataclass(frozen=True, slots=True)
class RNone:
    def __repr__(self) -> str:
        return "none"


@dataclass(frozen=True, slots=True)
class RBuiltin:
    name: str  # num | atm | var

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class RNamed:
    key: str  # registry key, e.g. "list/1" or "list/2"
    params: tuple["TypeRef", ...] = ()

    def __repr__(self) -> str:
        base = self.key.split("/")[0]
        if self.params:
            return f"{base}({','.join(map(repr, self.params))})"
        return base


TypeRef = RAny | RNone | RBuiltin | RNamed

ANY = RAny()
NONE = RNone()
NUM = RBuiltin("num")
ATM = RBuiltin("atm")
VART = RBuiltin("var")


# -- grammar shapes ----------------------------------------------------
#
# One alternative of a named type is a shape: a term skeleton whose
# leaves are TypeRefs or parameter references.


@dataclass(frozen=True, slots=True)
class SAtom:
    name: str


@dataclass(frozen=True, slots=True)
class SNum:
    value: object


@dataclass(frozen=True, slots=True)
class SStruct:
    functor: str
    children: tuple["Shape", ...]


@dataclass(frozen=True, slots=True)
class SParam:
    index: int


Shape = SAtom | SNum | SStruct | SParam | TypeRef


@dataclass(frozen=True, slots=True)
class TypeDef:
    key: str
    nparams: int
    alts: tuple[Shape, ...]


def subst_shape(s: Shape, params: tuple[TypeRef, ...]) -> Shape:
    if isinstance(s, SParam):
        return params[s.index] if s.index < len(params) else ANY
    if isinstance(s, SStruct):
        return SStruct(s.functor, tuple(subst_shape(c, params) for c in s.children))
    if isinstance(s, RNamed) and s.params:
        # grammar-level named references may carry open parameter slots
        return RNamed(s.key, tuple(subst_shape(p, params) for p in s.params))  # type: ignore[arg-type]
    return s


class TypeEnv:
    """Declared grammars plus memoized inclusion/overlap deciders."""

    def __init__(self) -> None:
        self.defs: dict[str, TypeDef] = {}
        self.order: list[str] = []
        self._incl_memo: dict[tuple[Shape, Shape], bool] = {}
        self._overlap_memo: dict[tuple[Shape, Shape], bool] = {}
        self._abstract_memo: dict[Shape, TypeRef] = {}
        self._empty_memo: dict[TypeRef, bool] = {}
        self._canon_memo: dict[TypeRef, TypeRef] = {}

    def define(self, key: str, nparams: int, alts: Iterable[Shape]) -> None:
        self.defs[key] = TypeDef(key, nparams, tuple(alts))
        if key not in self.order:
            self.order.append(key)
        self._incl_memo.clear()
        self._overlap_memo.clear()
        self._abstract_memo.clear()
        self._empty_memo.clear()
        self._canon_memo.clear()

    def alts_of(self, t: RNamed) -> tuple[Shape, ...]:
        d = self.defs.get(t.key)
        if d is None:
            return ()
        params = t.params if t.params else (ANY,) * d.nparams
        return tuple(subst_shape(a, params) for a in d.alts)

    # -- emptiness ----------------------------------------------------

    def is_empty(self, t: TypeRef) -> bool:
        if t in self._empty_memo:
            return self._empty_memo[t]
        out = self._empty(t, set())
        self._empty_memo[t] = out
        return out

    def _empty(self, s: Shape, assume: set) -> bool:
        if isinstance(s, RNone):
            return True
        if isinstance(s, (RAny, RBuiltin, SAtom, SNum, SParam)):
            return False
        if isinstance(s, RNamed):
            if s in assume:
                return True  # least fixpoint: a pure cycle is empty
            alts = self.alts_of(s)
            if not alts:
                return True
            assume = assume | {s}
            return all(self._empty(a, assume) for a in alts)
        assert isinstance(s, SStruct)
        return any(self._empty(c, assume) for c in s.children)

    # -- inclusion ----------------------------------------------------

    def included(self, a: Shape, b: Shape) -> bool:
        key = (a, b)
        hit = self._incl_memo.get(key)
        if hit is not None:
            return hit
        out = self._included(a, b, set())
        self._incl_memo[key] = out
        return out

    def _included(self, a: Shape, b: Shape, assume: set) -> bool:
        if a == b:
            return True
        if isinstance(b, RAny):
            return True
        if isinstance(a, RNone):
            return True
        if isinstance(b, RNone):
            return self._empty(a, set())
        if isinstance(a, RAny):
            return False
        key = (a, b)
        if isinstance(a, RNamed) or isinstance(b, RNamed):
            if key in assume:
                return True  # coinductive: assume the pair holds on cycles
            assume = assume | {key}
        if isinstance(a, RNamed):
            alts = self.alts_of(a)
            return all(self._included(alt, b, assume) for alt in alts)
        if isinstance(b, RNamed):
            alts = self.alts_of(b)
            return any(self._included(a, alt, assume) for alt in alts)
        if isinstance(a, RBuiltin):
            if isinstance(b, RBuiltin):
                return a.name == b.name
            return False
        if isinstance(a, SAtom):
            return (isinstance(b, RBuiltin) and b.name == "atm") or (
                isinstance(b, SAtom) and a.name == b.name
            )
        if isinstance(a, SNum):
            return (isinstance(b, RBuiltin) and b.name == "num") or (
                isinstance(b, SNum) and a.value == b.value
            )
        assert isinstance(a, SStruct)
        if isinstance(b, SStruct):
            return (
                a.functor == b.functor
                and len(a.children) == len(b.children)
                and all(self._included(x, y, assume) for x, y in zip(a.children, b.children))
            )
        return False

    # -- overlap (conservative: True when unsure) ----------------------

    def may_overlap(self, a: Shape, b: Shape) -> bool:
        key = (a, b)
        hit = self._overlap_memo.get(key)
        if hit is not None:
            return hit
        out = self._overlap(a, b, set())
        self._overlap_memo[key] = out
        return out

    def _overlap(self, a: Shape, b: Shape, assume: set) -> bool:
        if isinstance(a, RNone) or isinstance(b, RNone):
            return False
        if isinstance(a, RAny):
            return not self._empty(b, set())
        if isinstance(b, RAny):
            return not self._empty(a, set())
        key = (a, b)
        if isinstance(a, RNamed) or isinstance(b, RNamed):
            if key in assume:
                return True
            assume = assume | {key}
        if isinstance(a, RNamed):
            return any(self._overlap(alt, b, assume) for alt in self.alts_of(a))
        if isinstance(b, RNamed):
            return any(self._overlap(a, alt, assume) for alt in self.alts_of(b))
        an = _shape_class(a)
        bn = _shape_class(b)
        if an != bn:
            return False
        if an == "var":
            return True
        if an == "num":
            if isinstance(a, SNum) and isinstance(b, SNum):
                return a.value == b.value
            return True
        if an == "atm":
            if isinstance(a, SAtom) and isinstance(b, SAtom):
                return a.name == b.name
            return True
        assert isinstance(a, SStruct) and isinstance(b, SStruct)
        return (
            a.functor == b.functor
            and len(a.children) == len(b.children)
            and all(self._overlap(x, y, assume) for x, y in zip(a.children, b.children))
        )

    # -- join / meet over the declared universe -------------------------

    def param_pool(self) -> list[TypeRef]:
        pool: list[TypeRef] = [NONE, NUM, ATM]
        pool.extend(RNamed(k) for k in self.order)
        pool.append(ANY)
        return pool

    def named_candidates(self) -> list[TypeRef]:
        out: list[TypeRef] = []
        for key in self.order:
            d = self.defs[key]
            if d.nparams == 0:
                out.append(RNamed(key))
            else:
                for p in self.param_pool():
                    out.append(RNamed(key, (p,) * d.nparams))
        return out

    def lub(self, a: TypeRef, b: TypeRef) -> TypeRef:
        if self.included(a, b):
            return b
        if self.included(b, a):
            return a
        if isinstance(a, RNamed) and isinstance(b, RNamed) and a.key == b.key and a.params and b.params:
            return RNamed(a.key, tuple(self.lub(x, y) for x, y in zip(a.params, b.params)))
        cands = [
            c
            for c in self.named_candidates() + [NUM, ATM]
            if self.included(a, c) and self.included(b, c)
        ]
        best = _minimal(cands, self.included)
        return best if best is not None else ANY

    def glb(self, a: TypeRef, b: TypeRef) -> TypeRef:
        if self.included(a, b):
            return a
        if self.included(b, a):
            return b
        if isinstance(a, RNamed) and isinstance(b, RNamed) and a.key == b.key and a.params and b.params:
            return RNamed(a.key, tuple(self.glb(x, y) for x, y in zip(a.params, b.params)))
        if not self.may_overlap(a, b):
            return NONE
        cands = [
            c
            for c in self.named_candidates() + [NUM, ATM, VART]
            if self.included(c, a) and self.included(c, b)
        ]
        best = _maximal(cands, self.included)
        return best if best is not None else NONE

    # -- term abstraction ----------------------------------------------

    def abstract_shape(self, s: Shape) -> TypeRef:
        if isinstance(s, (RAny, RNone, RBuiltin, RNamed)):
            return s
        hit = self._abstract_memo.get(s)
        if hit is not None:
            return hit
        cands = [c for c in self.named_candidates() + [NUM, ATM] if self.included(s, c)]
        best = _minimal(cands, self.included)
        if best is None:
            best = ANY
        self._abstract_memo[s] = best
        return best

    def collapse(self, t: TypeRef, budget: int) -> TypeRef:
        """Widening helper: drop parameters nested deeper than the budget."""
        if not isinstance(t, RNamed) or not t.params:
            return t
        if budget <= 0:
            return RNamed(t.key, ())
        return RNamed(t.key, tuple(self.collapse(p, budget - 1) for p in t.params))

    def canonical(self, t: TypeRef) -> TypeRef:
        """One representative per equivalence class: `list/2(any)` and
        `list/1` denote the same term set and must compare equal, or the
        lattice loses antisymmetry and the engine loses determinism."""
        hit = self._canon_memo.get(t)
        if hit is not None:
            return hit
        out = t
        if isinstance(out, RNamed):
            if out.params:
                out = RNamed(out.key, tuple(self.canonical(p) for p in out.params))
            if self.is_empty(out):
                out = NONE
            else:
                equivalents = [out]
                for c in self.named_candidates():
                    if c != out and self.included(c, out) and self.included(out, c):
                        equivalents.append(c)
                out = min(equivalents, key=lambda x: (len(repr(x)), repr(x)))
        self._canon_memo[t] = out
        return out


def _shape_class(s: Shape) -> str:
    if isinstance(s, RBuiltin):
        return {"num": "num", "atm": "atm", "var": "var"}[s.name]
    if isinstance(s, SNum):
        return "num"
    if isinstance(s, SAtom):
        return "atm"
    return "struct"


def _minimal(cands: list[TypeRef], included) -> TypeRef | None:
    """First candidate with no strictly smaller peer (stable tie-break)."""
    for c in cands:
        if not any(included(o, c) and not included(c, o) for o in cands):
            return c
    return None


def _maximal(cands: list[TypeRef], included) -> TypeRef | None:
    for c in cands:
        if not any(included(c, o) and not included(o, c) for o in cands):
            return c
    return None


def shape_of(t: Term, types: Mapping[str, TypeRef]) -> Shape:
    if isinstance(t, Var):
        return types.get(t.name, ANY)
    if isinstance(t, Atom):
        return SAtom(t.name)
    if isinstance(t, Num):
        return SNum(t.value)
    assert isinstance(t, Struct)
    return SStruct(t.functor, tuple(shape_of(a, types) for a in t.args))


# -- the domain --------------------------------------------------------


class RtValue:
    __slots__ = ("vars", "types", "_index")

    def __init__(self, vars: tuple[str, ...], types: tuple[TypeRef, ...]):
        self.vars = vars
        self.types = types
        self._index = {name: i for i, name in enumerate(vars)}

    def type_of(self, name: str) -> TypeRef:
        return self.types[self._index[name]]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, RtValue)
            and self.vars == other.vars
            and self.types == other.types
        )

    def __hash__(self) -> int:
        return hash((self.vars, self.types))

    def __repr__(self) -> str:
        inner = ", ".join(f"{v}:{t!r}" for v, t in zip(self.vars, self.types))
        return f"{{{inner}}}"


class RegTypesDomain(AbstractDomain):
    domain_id = "regtypes"
    WIDEN_DEPTH = 3

    def __init__(self, env: TypeEnv | None = None):
        self.env = env if env is not None else TypeEnv()

    def _mk(self, vars: Sequence[str], types: Sequence[TypeRef]) -> RtValue:
        return RtValue(tuple(vars), tuple(self.env.canonical(t) for t in types))

    def top(self, vars: Sequence[str]) -> RtValue:
        vs = tuple(sorted(vars))
        return self._mk(vs, (ANY,) * len(vs))

    def fresh(self, vars: Sequence[str]) -> RtValue:
        vs = tuple(sorted(vars))
        return self._mk(vs, (VART,) * len(vs))

    def vars_of(self, v: RtValue) -> tuple[str, ...]:
        return v.vars

    def is_empty_value(self, v) -> bool:
        if v is BOTTOM:
            return True
        return any(self.env.is_empty(t) for t in v.types)

    def leq(self, a, b) -> bool:
        if a is BOTTOM:
            return True
        if b is BOTTOM:
            return False
        self._check(a, b)
        return all(self.env.included(x, y) for x, y in zip(a.types, b.types))

    def lub(self, a, b):
        if a is BOTTOM:
            return b
        if b is BOTTOM:
            return a
        self._check(a, b)
        return self._mk(a.vars, [self.env.lub(x, y) for x, y in zip(a.types, b.types)])

    def glb(self, a, b):
        if a is BOTTOM or b is BOTTOM:
            return BOTTOM
        self._check(a, b)
        return self._mk(a.vars, [self.env.glb(x, y) for x, y in zip(a.types, b.types)])

    def refine(self, a, b):
        """Assume-meet: refuses to narrow a variable to none unless the types
        are provably disjoint (the poset meet may under-shoot on overlapping
        incomparable grammars)."""
        if a is BOTTOM or b is BOTTOM:
            return BOTTOM
        self._check(a, b)
        out = []
        for x, y in zip(a.types, b.types):
            z = self.env.glb(x, y)
            if isinstance(z, RNone) and self.env.may_overlap(x, y):
                z = x
            out.append(z)
        return self._mk(a.vars, out)

    def widen(self, old, new):
        j = self.lub(old, new)
        if j is BOTTOM:
            return j
        return self._mk(j.vars, [self.env.collapse(t, self.WIDEN_DEPTH) for t in j.types])

    def incompatible(self, a, b) -> bool:
        if a is BOTTOM or b is BOTTOM:
            return True
        self._check(a, b)
        if self.is_empty_value(a) or self.is_empty_value(b):
            return True
        return any(not self.env.may_overlap(x, y) for x, y in zip(a.types, b.types))

    def instantiation_closure(self, v):
        if v is BOTTOM:
            return v
        return self._mk(v.vars, [_close_var_marker(t) for t in v.types])

    def restrict(self, v, vars: Sequence[str]):
        if v is BOTTOM:
            return BOTTOM
        keep = tuple(sorted(x for x in vars if x in v._index))
        return self._mk(keep, [v.type_of(x) for x in keep])

    def rename(self, v, mapping: Mapping[str, str]):
        if v is BOTTOM:
            return BOTTOM
        pairs = sorted((mapping.get(x, x), t) for x, t in zip(v.vars, v.types))
        return self._mk([p[0] for p in pairs], [p[1] for p in pairs])

    def combine(self, v, w):
        if v is BOTTOM or w is BOTTOM:
            return BOTTOM
        pairs = sorted(list(zip(v.vars, v.types)) + list(zip(w.vars, w.types)))
        return self._mk([p[0] for p in pairs], [p[1] for p in pairs])

    def amgu(self, v, x: Var, t: Term):
        if v is BOTTOM:
            return BOTTOM
        env = self.env
        types = {name: ty for name, ty in zip(v.vars, v.types)}
        tx = types[x.name]

        if isinstance(t, Var):
            if t.name == x.name:
                return v
            ty = types[t.name]
            merged = self._unify_types(tx, ty)
            if isinstance(merged, RNone) and not env.may_overlap(_devar(tx), _devar(ty)):
                return BOTTOM
            types[x.name] = merged
            types[t.name] = merged
            return self._mk(v.vars, [types[name] for name in v.vars])

        sh = shape_of(t, types)
        ts = env.abstract_shape(sh)
        merged = self._unify_types(tx, ts)
        if isinstance(merged, RNone) and not env.may_overlap(_devar(tx), _devar(ts)):
            return BOTTOM  # definite unification failure
        types[x.name] = merged
        if not (isinstance(tx, RBuiltin) and tx.name == "var"):
            # x may already be bound: unification can instantiate t's variables
            for u in term_vars(t):
                if u.name != x.name:
                    types[u.name] = _devar(types[u.name])
        self._refine_term_vars(t, merged, types)
        return self._mk(v.vars, [types[name] for name in v.vars])

    def _unify_types(self, a: TypeRef, b: TypeRef) -> TypeRef:
        if isinstance(a, RBuiltin) and a.name == "var" and isinstance(b, RBuiltin) and b.name == "var":
            return VART
        da, db = _devar(a), _devar(b)
        z = self.env.glb(da, db)
        if isinstance(z, RNone) and self.env.may_overlap(da, db):
            return da  # meet not expressible: keep the old bound
        return z

    def _refine_term_vars(self, t: Term, tref: TypeRef, types: dict[str, TypeRef]) -> None:
        """Push x's type down through t's structure (positional projection)."""
        env = self.env
        if isinstance(t, Var):
            if not isinstance(tref, RAny):
                types[t.name] = self._unify_types(types[t.name], tref)
            return
        if not isinstance(t, Struct):
            return
        expanded: list[Shape] = []
        if isinstance(tref, RNamed):
            expanded = [a for a in env.alts_of(tref)]
        elif isinstance(tref, SStruct):
            expanded = [tref]
        else:
            return
        child_types: list[TypeRef | None] = [None] * len(t.args)
        for alt in expanded:
            if isinstance(alt, RNamed):
                self._refine_term_vars(t, alt, types)
                continue
            if not isinstance(alt, SStruct):
                continue
            if alt.functor != t.functor or len(alt.children) != len(t.args):
                continue
            for i, child in enumerate(alt.children):
                ct = child if isinstance(child, (RAny, RNone, RBuiltin, RNamed)) else env.abstract_shape(child)
                prev = child_types[i]
                child_types[i] = ct if prev is None else env.lub(prev, ct)
        for arg, ct in zip(t.args, child_types):
            if ct is None:
                continue
            self._refine_term_vars(arg, ct, types)

    def to_key(self, v, ordered_vars: Sequence[str]):
        if v is BOTTOM:
            return "bottom"
        return tuple(v.type_of(x) for x in ordered_vars)

    def from_key(self, payload, ordered_vars: Sequence[str]):
        if payload == "bottom":
            return BOTTOM
        pairs = sorted(zip(ordered_vars, payload))
        return self._mk([p[0] for p in pairs], [p[1] for p in pairs])

    def render(self, v) -> str:
        if v is BOTTOM:
            return "bottom"
        inner = ", ".join(f"{x}:{t!r}" for x, t in zip(v.vars, v.types))
        return "{" + inner + "}"

    def value_to_json(self, v):
        if v is BOTTOM:
            return "bottom"
        return {x: _type_to_json(t) for x, t in zip(v.vars, v.types)}

    def value_from_json(self, data):
        if data == "bottom":
            return BOTTOM
        items = sorted(data.items())
        return self._mk([k for k, _ in items], [_type_from_json(d) for _, d in items])

    @staticmethod
    def _check(a: RtValue, b: RtValue) -> None:
        if a.vars != b.vars:
            raise ValueError(f"variable sets differ: {a.vars} vs {b.vars}")


def _devar(t: TypeRef) -> TypeRef:
    return ANY if isinstance(t, RBuiltin) and t.name == "var" else t


def _close_var_marker(t: TypeRef) -> TypeRef:
    if isinstance(t, RBuiltin) and t.name == "var":
        return ANY
    if isinstance(t, RNamed) and t.params:
        return RNamed(t.key, tuple(_close_var_marker(p) for p in t.params))
    return t


def _type_to_json(t: TypeRef):
    if isinstance(t, RAny):
        return "any"
    if isinstance(t, RNone):
        return "none"
    if isinstance(t, RBuiltin):
        return {"builtin": t.name}
    assert isinstance(t, RNamed)
    return {"named": t.key, "params": [_type_to_json(p) for p in t.params]}


def _type_from_json(d) -> TypeRef:
    if d == "any":
        return ANY
    if d == "none":
        return NONE
    if "builtin" in d:
        return RBuiltin(d["builtin"])
    return RNamed(d["named"], tuple(_type_from_json(p) for p in d["params"]))
