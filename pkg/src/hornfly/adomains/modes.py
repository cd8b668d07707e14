"""Instantiation-mode domain: ground / var / nonvar / any per variable.

Lattice per variable: ground < nonvar < any and var < any; ground meets
var at the empty set, which collapses the whole value to bottom.
"""

from __future__ import annotations

from typing import Any, Mapping, Sequence

from .. import kernels
from ..kernels import ANY, FREE, GROUND, NONVAR
from ..terms import Term, Var, term_vars
from .base import BOTTOM, AbstractDomain

_NAMES = {GROUND: "ground", FREE: "var", NONVAR: "nonvar", ANY: "any"}
_CODES = {v: k for k, v in _NAMES.items()}


class ModesValue:
    __slots__ = ("vars", "codes", "_index")

    def __init__(self, vars: tuple[str, ...], codes: bytes):
        self.vars = vars
        self.codes = codes
        self._index = {name: i for i, name in enumerate(vars)}

    def mode_of(self, name: str) -> int:
        return self.codes[self._index[name]]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, ModesValue)
            and self.vars == other.vars
            and self.codes == other.codes
        )

    def __hash__(self) -> int:
        return hash((self.vars, self.codes))

    def __repr__(self) -> str:
        inner = ", ".join(f"{v}:{_NAMES[c]}" for v, c in zip(self.vars, self.codes))
        return f"{{{inner}}}"


class ModesDomain(AbstractDomain):
    domain_id = "modes"

    def _mk(self, vars: Sequence[str], codes: bytes | bytearray) -> ModesValue:
        return ModesValue(tuple(vars), bytes(codes))

    def top(self, vars: Sequence[str]) -> ModesValue:
        vs = tuple(sorted(vars))
        return self._mk(vs, bytes([ANY]) * len(vs))

    def fresh(self, vars: Sequence[str]) -> ModesValue:
        vs = tuple(sorted(vars))
        return self._mk(vs, bytes([FREE]) * len(vs))

    def vars_of(self, v: ModesValue) -> tuple[str, ...]:
        return v.vars

    def leq(self, a, b) -> bool:
        if a is BOTTOM:
            return True
        if b is BOTTOM:
            return False
        self._check(a, b)
        return kernels.modes_leq(a.codes, b.codes)

    def lub(self, a, b):
        if a is BOTTOM:
            return b
        if b is BOTTOM:
            return a
        self._check(a, b)
        return self._mk(a.vars, kernels.modes_lub(a.codes, b.codes))

    def glb(self, a, b):
        if a is BOTTOM or b is BOTTOM:
            return BOTTOM
        self._check(a, b)
        out = kernels.modes_glb(a.codes, b.codes)
        return BOTTOM if out is None else self._mk(a.vars, out)

    def restrict(self, v, vars: Sequence[str]):
        if v is BOTTOM:
            return BOTTOM
        keep = tuple(sorted(x for x in vars if x in v._index))
        return self._mk(keep, bytes(v.codes[v._index[x]] for x in keep))

    def rename(self, v, mapping: Mapping[str, str]):
        if v is BOTTOM:
            return BOTTOM
        pairs = sorted((mapping.get(x, x), v.codes[i]) for i, x in enumerate(v.vars))
        return self._mk(tuple(p[0] for p in pairs), bytes(p[1] for p in pairs))

    def combine(self, v, w):
        if v is BOTTOM or w is BOTTOM:
            return BOTTOM
        merged = sorted(list(zip(v.vars, v.codes)) + list(zip(w.vars, w.codes)))
        return self._mk(tuple(p[0] for p in merged), bytes(p[1] for p in merged))

    def amgu(self, v, x: Var, t: Term):
        if v is BOTTOM:
            return BOTTOM
        codes = bytearray(v.codes)
        xi = v._index[x.name]
        if isinstance(t, Var):
            yi = v._index[t.name]
            m = kernels.modes_unify_codes(codes[xi], codes[yi])
            codes[xi] = codes[yi] = m
            return self._mk(v.vars, codes)
        tvs = [v._index[u.name] for u in term_vars(t)]
        if all(codes[i] == GROUND for i in tvs):
            codes[xi] = GROUND
            return self._mk(v.vars, codes)
        if codes[xi] == GROUND:
            for i in tvs:
                codes[i] = GROUND
            return self._mk(v.vars, codes)
        was_free = codes[xi] == FREE
        codes[xi] = NONVAR
        if not was_free:
            # x may already be bound: unification can instantiate t's variables
            for i in tvs:
                if codes[i] != GROUND:
                    codes[i] = ANY
        return self._mk(v.vars, codes)

    def instantiation_closure(self, v):
        if v is BOTTOM:
            return v
        codes = bytes(ANY if c == FREE else c for c in v.codes)
        return self._mk(v.vars, codes)

    def to_key(self, v, ordered_vars: Sequence[str]):
        if v is BOTTOM:
            return "bottom"
        return bytes(v.codes[v._index[x]] for x in ordered_vars)

    def from_key(self, payload, ordered_vars: Sequence[str]):
        if payload == "bottom":
            return BOTTOM
        pairs = sorted(zip(ordered_vars, payload))
        return self._mk(tuple(p[0] for p in pairs), bytes(p[1] for p in pairs))

    def render(self, v) -> str:
        if v is BOTTOM:
            return "bottom"
        inner = ", ".join(f"{x}:{_NAMES[c]}" for x, c in zip(v.vars, v.codes))
        return "{" + inner + "}"

    def value_to_json(self, v):
        if v is BOTTOM:
            return "bottom"
        return {x: _NAMES[c] for x, c in zip(v.vars, v.codes)}

    def value_from_json(self, data):
        if data == "bottom":
            return BOTTOM
        items = sorted(data.items())
        return self._mk(
            tuple(k for k, _ in items), bytes(_CODES[m] for _, m in items)
        )

    @staticmethod
    def _check(a: ModesValue, b: ModesValue) -> None:
        if a.vars != b.vars:
            raise ValueError(f"variable sets differ: {a.vars} vs {b.vars}")
