"""First-order terms: the values everything else manipulates.

Terms are immutable and hashable so they can key dictionaries (analysis
graph nodes, memo tables) and be shared freely between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Union


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __repr__(self) -> str:
        return f"Var({self.name})"


@dataclass(frozen=True, slots=True)
class Atom:
    name: str

    def __repr__(self) -> str:
        return f"Atom({self.name})"


@dataclass(frozen=True, slots=True)
class Num:
    value: Union[int, Fraction]

    def __repr__(self) -> str:
        return f"Num({self.value})"


@dataclass(frozen=True, slots=True)
class Struct:
    functor: str
    args: tuple["Term", ...]

    def __post_init__(self) -> None:
        if not self.args:
            raise ValueError("Struct arity must be >= 1; use Atom for arity 0")

    def __repr__(self) -> str:
        return f"Struct({self.functor}/{len(self.args)})"


Term = Union[Var, Atom, Num, Struct]

NIL = Atom("[]")
TRUE = Atom("true")
CURLY = "{}"


def mkstruct(functor: str, args: tuple[Term, ...] | list[Term]) -> Term:
    """Compound if args nonempty, atom otherwise."""
    args = tuple(args)
    return Struct(functor, args) if args else Atom(functor)


def mklist(items: list[Term] | tuple[Term, ...], tail: Term = NIL) -> Term:
    out = tail
    for item in reversed(items):
        out = Struct(".", (item, out))
    return out


def list_parts(t: Term) -> tuple[list[Term], Term]:
    """Split a cons chain into (elements, tail). Tail is NIL for proper lists."""
    items: list[Term] = []
    while isinstance(t, Struct) and t.functor == "." and len(t.args) == 2:
        items.append(t.args[0])
        t = t.args[1]
    return items, t


def functor_arity(t: Term) -> tuple[str, int]:
    if isinstance(t, Atom):
        return t.name, 0
    if isinstance(t, Struct):
        return t.functor, len(t.args)
    raise TypeError(f"not a callable term: {t!r}")


def pred_key(t: Term) -> str:
    name, arity = functor_arity(t)
    return f"{name}/{arity}"


def term_vars(t: Term) -> tuple[Var, ...]:
    """All variables in t, in first-occurrence order, deduplicated."""
    seen: dict[Var, None] = {}

    def walk(u: Term) -> None:
        if isinstance(u, Var):
            seen.setdefault(u)
        elif isinstance(u, Struct):
            for a in u.args:
                walk(a)

    walk(t)
    return tuple(seen)


def iter_subterms(t: Term) -> Iterator[Term]:
    stack = [t]
    while stack:
        u = stack.pop()
        yield u
        if isinstance(u, Struct):
            stack.extend(reversed(u.args))


def is_ground(t: Term) -> bool:
    return all(not isinstance(u, Var) for u in iter_subterms(t))


def rename_term(t: Term, mapping: Mapping[Var, Term]) -> Term:
    """Substitute variables by terms (non-capturing: mapping values are final)."""
    if isinstance(t, Var):
        return mapping.get(t, t)
    if isinstance(t, Struct):
        args = tuple(rename_term(a, mapping) for a in t.args)
        return Struct(t.functor, args)
    return t


_FRESH_PREFIX = "_R"


def rename_apart(t: Term, counter: int) -> tuple[Term, int]:
    """Rename every variable of t to a fresh one; returns (term, next counter)."""
    mapping: dict[Var, Term] = {}
    for v in term_vars(t):
        mapping[v] = Var(f"{_FRESH_PREFIX}{counter}")
        counter += 1
    return rename_term(t, mapping), counter


def canonical_term(t: Term) -> Term:
    """Rename variables to _0, _1, ... in first-occurrence order.

    Two terms are structurally equal up to variable naming iff their
    canonical forms are equal. Used for content hashing.
    """
    mapping = {v: Var(f"_{i}") for i, v in enumerate(term_vars(t))}
    return rename_term(t, mapping)


def compare_terms(a: Term, b: Term) -> int:
    """Standard order of terms: Var < Num < Atom < Struct, then structural."""
    ka, kb = _order_class(a), _order_class(b)
    if ka != kb:
        return -1 if ka < kb else 1
    if isinstance(a, Var):
        assert isinstance(b, Var)
        return _cmp(a.name, b.name)
    if isinstance(a, Num):
        assert isinstance(b, Num)
        return _cmp(a.value, b.value)
    if isinstance(a, Atom):
        assert isinstance(b, Atom)
        return _cmp(a.name, b.name)
    assert isinstance(a, Struct) and isinstance(b, Struct)
    if len(a.args) != len(b.args):
        return _cmp(len(a.args), len(b.args))
    if a.functor != b.functor:
        return _cmp(a.functor, b.functor)
    for x, y in zip(a.args, b.args):
        c = compare_terms(x, y)
        if c:
            return c
    return 0


def _order_class(t: Term) -> int:
    if isinstance(t, Var):
        return 0
    if isinstance(t, Num):
        return 1
    if isinstance(t, Atom):
        return 2
    return 3


def _cmp(a, b) -> int:
    return (a > b) - (a < b)
