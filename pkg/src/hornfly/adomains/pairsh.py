"""Pair-sharing with groundness and may-freeness.

A value tracks, per clause variable: definite groundness, which pairs of
variables may share a common variable, and which variables may still be
free. Sharing pairs never mention ground variables and are irreflexive.
Cliques are not used; plain pairs trade precision for simplicity.
"""

from __future__ import annotations

from typing import Any, Mapping, Sequence

from .. import kernels
from ..terms import Term, Var, term_vars
from .base import BOTTOM, AbstractDomain


class ShValue:
    __slots__ = ("vars", "ground", "free", "share", "_index")

    def __init__(self, vars: tuple[str, ...], ground: int, free: int, share: tuple[int, ...]):
        self.vars = vars
        self.ground = ground
        self.free = free
        self.share = share
        self._index = {name: i for i, name in enumerate(vars)}

    def state(self) -> tuple[int, int, tuple[int, ...]]:
        return (self.ground, self.free, self.share)

    def ground_vars(self) -> set[str]:
        return {x for i, x in enumerate(self.vars) if self.ground >> i & 1}

    def may_free_vars(self) -> set[str]:
        return {x for i, x in enumerate(self.vars) if self.free >> i & 1}

    def may_share_pairs(self) -> set[tuple[str, str]]:
        out = set()
        for i, x in enumerate(self.vars):
            for j in range(i + 1, len(self.vars)):
                if self.share[i] >> j & 1:
                    out.add((x, self.vars[j]))
        return out

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, ShValue)
            and self.vars == other.vars
            and self.ground == other.ground
            and self.free == other.free
            and self.share == other.share
        )

    def __hash__(self) -> int:
        return hash((self.vars, self.ground, self.free, self.share))

    def __repr__(self) -> str:
        return f"sh(g={sorted(self.ground_vars())}, sh={sorted(self.may_share_pairs())}, f={sorted(self.may_free_vars())})"


class PairShDomain(AbstractDomain):
    domain_id = "pairsh"

    def _mk(self, vars: tuple[str, ...], state) -> ShValue:
        g, f, share = kernels.sh_normalize(len(vars), *state)
        return ShValue(vars, g, f, share)

    def top(self, vars: Sequence[str]) -> ShValue:
        vs = tuple(sorted(vars))
        n = len(vs)
        full = (1 << n) - 1
        share = tuple(full & ~(1 << i) for i in range(n))
        return self._mk(vs, (0, full, share))

    def fresh(self, vars: Sequence[str]) -> ShValue:
        vs = tuple(sorted(vars))
        n = len(vs)
        return self._mk(vs, (0, (1 << n) - 1, (0,) * n))

    def vars_of(self, v: ShValue) -> tuple[str, ...]:
        return v.vars

    def leq(self, a, b) -> bool:
        if a is BOTTOM:
            return True
        if b is BOTTOM:
            return False
        self._check(a, b)
        return kernels.sh_leq(len(a.vars), a.state(), b.state())

    def lub(self, a, b):
        if a is BOTTOM:
            return b
        if b is BOTTOM:
            return a
        self._check(a, b)
        return self._mk(a.vars, kernels.sh_lub(len(a.vars), a.state(), b.state()))

    def glb(self, a, b):
        if a is BOTTOM or b is BOTTOM:
            return BOTTOM
        self._check(a, b)
        return self._mk(a.vars, kernels.sh_glb(len(a.vars), a.state(), b.state()))

    def restrict(self, v, vars: Sequence[str]):
        if v is BOTTOM:
            return BOTTOM
        keep = tuple(sorted(x for x in vars if x in v._index))
        idx = [v._index[x] for x in keep]
        g = f = 0
        share = []
        for new_i, old_i in enumerate(idx):
            if v.ground >> old_i & 1:
                g |= 1 << new_i
            if v.free >> old_i & 1:
                f |= 1 << new_i
            row = 0
            for new_j, old_j in enumerate(idx):
                if v.share[old_i] >> old_j & 1:
                    row |= 1 << new_j
            share.append(row)
        return self._mk(keep, (g, f, tuple(share)))

    def rename(self, v, mapping: Mapping[str, str]):
        if v is BOTTOM:
            return BOTTOM
        new_names = [mapping.get(x, x) for x in v.vars]
        order = sorted(range(len(new_names)), key=lambda i: new_names[i])
        vs = tuple(new_names[i] for i in order)
        pos = {old: new for new, old in enumerate(order)}
        g = f = 0
        share = [0] * len(vs)
        for old_i in range(len(v.vars)):
            ni = pos[old_i]
            if v.ground >> old_i & 1:
                g |= 1 << ni
            if v.free >> old_i & 1:
                f |= 1 << ni
            for old_j in range(len(v.vars)):
                if v.share[old_i] >> old_j & 1:
                    share[ni] |= 1 << pos[old_j]
        return self._mk(vs, (g, f, tuple(share)))

    def combine(self, v, w):
        if v is BOTTOM or w is BOTTOM:
            return BOTTOM
        names = list(v.vars) + list(w.vars)
        order = sorted(range(len(names)), key=lambda i: names[i])
        vs = tuple(names[i] for i in order)
        pos = {old: new for new, old in enumerate(order)}
        nv = len(v.vars)
        g = f = 0
        share = [0] * len(vs)
        for old_i in range(len(names)):
            src, i0 = (v, old_i) if old_i < nv else (w, old_i - nv)
            base = 0 if old_i < nv else nv
            ni = pos[old_i]
            if src.ground >> i0 & 1:
                g |= 1 << ni
            if src.free >> i0 & 1:
                f |= 1 << ni
            row = src.share[i0]
            for j0 in range(len(src.vars)):
                if row >> j0 & 1:
                    share[ni] |= 1 << pos[base + j0]
        return self._mk(vs, (g, f, tuple(share)))

    def amgu(self, v, x: Var, t: Term):
        if v is BOTTOM:
            return BOTTOM
        xi = v._index[x.name]
        tvs = term_vars(t)
        tmask = 0
        for u in tvs:
            tmask |= 1 << v._index[u.name]
        t_is_var = isinstance(t, Var)
        t_has_structure = not t_is_var
        state = kernels.sh_amgu(
            len(v.vars), v.state(), xi, tmask, t_is_var, t_has_structure
        )
        return self._mk(v.vars, state)

    def instantiation_closure(self, v):
        if v is BOTTOM:
            return v
        top = self.top(v.vars)
        return self._mk(v.vars, (v.ground, top.free, top.share))

    def to_key(self, v, ordered_vars: Sequence[str]):
        if v is BOTTOM:
            return "bottom"
        idx = [v._index[x] for x in ordered_vars]
        g = f = 0
        share = []
        for new_i, old_i in enumerate(idx):
            if v.ground >> old_i & 1:
                g |= 1 << new_i
            if v.free >> old_i & 1:
                f |= 1 << new_i
            row = 0
            for new_j, old_j in enumerate(idx):
                if v.share[old_i] >> old_j & 1:
                    row |= 1 << new_j
            share.append(row)
        return (g, f, tuple(share))

    def from_key(self, payload, ordered_vars: Sequence[str]):
        if payload == "bottom":
            return BOTTOM
        g0, f0, share0 = payload
        names = list(ordered_vars)
        order = sorted(range(len(names)), key=lambda i: names[i])
        vs = tuple(names[i] for i in order)
        pos = {old: new for new, old in enumerate(order)}
        g = f = 0
        share = [0] * len(vs)
        for old_i in range(len(names)):
            ni = pos[old_i]
            if g0 >> old_i & 1:
                g |= 1 << ni
            if f0 >> old_i & 1:
                f |= 1 << ni
            for old_j in range(len(names)):
                if share0[old_i] >> old_j & 1:
                    share[ni] |= 1 << pos[old_j]
        return self._mk(vs, (g, f, tuple(share)))

    def render(self, v) -> str:
        if v is BOTTOM:
            return "bottom"
        pairs = ", ".join(f"({a},{b})" for a, b in sorted(v.may_share_pairs()))
        return (
            "{ground: [" + ", ".join(sorted(v.ground_vars())) + "]"
            ", mayShare: [" + pairs + "]"
            ", mayBeFree: [" + ", ".join(sorted(v.may_free_vars())) + "]}"
        )

    def value_to_json(self, v):
        if v is BOTTOM:
            return "bottom"
        return {
            "vars": list(v.vars),
            "ground": v.ground,
            "free": v.free,
            "share": list(v.share),
        }

    def value_from_json(self, data):
        if data == "bottom":
            return BOTTOM
        return self._mk(
            tuple(data["vars"]), (data["ground"], data["free"], tuple(data["share"]))
        )

    @staticmethod
    def _check(a: ShValue, b: ShValue) -> None:
        if a.vars != b.vars:
            raise ValueError(f"variable sets differ: {a.vars} vs {b.vars}")
