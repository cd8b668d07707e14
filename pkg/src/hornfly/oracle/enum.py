"""Ground-term and substitution enumeration for property-based checks."""

from __future__ import annotations

import itertools
from typing import Iterator, Sequence

from ..terms import Atom, Num, Struct, Term, Var, mklist

DEFAULT_ATOMS = ("a", "b", "red", "[]")
DEFAULT_NUMS = (0, 1, 2)
DEFAULT_FUNCTORS = ((".", 2), ("f", 1))


def enum_terms(
    depth: int,
    atoms: Sequence[str] = DEFAULT_ATOMS,
    nums: Sequence[int] = DEFAULT_NUMS,
    functors: Sequence[tuple[str, int]] = DEFAULT_FUNCTORS,
) -> list[Term]:
    """All ground terms of nesting depth <= depth over a small signature."""
    level: list[Term] = [Atom(a) for a in atoms if a != "[]"]
    level.append(Atom("[]"))
    level.extend(Num(n) for n in nums)
    out = list(level)
    prev = list(level)
    for _ in range(depth):
        nxt: list[Term] = []
        for functor, arity in functors:
            for combo in itertools.product(prev + out[: len(level)], repeat=arity):
                t = Struct(functor, combo)
                nxt.append(t)
        out.extend(nxt)
        prev = nxt
        if len(out) > 20000:
            break
    return out


def sample_terms(rng, count: int, depth: int = 3) -> list[Term]:
    """Random ground terms, list-biased (the domains care about lists)."""
    out = []
    for _ in range(count):
        out.append(_rand_term(rng, depth))
    return out


def _rand_term(rng, depth: int) -> Term:
    if depth <= 0 or rng.random() < 0.35:
        k = rng.randrange(5)
        if k == 0:
            return Atom(rng.choice(("a", "b", "red", "blue", "green")))
        if k == 1:
            return Num(rng.randrange(-3, 4))
        if k == 2:
            return Atom("[]")
        if k == 3:
            return mklist([_rand_term(rng, 0) for _ in range(rng.randrange(3))])
        return Atom("c")
    k = rng.randrange(3)
    if k == 0:
        return mklist([_rand_term(rng, depth - 1) for _ in range(rng.randrange(1, 3))])
    if k == 1:
        return Struct("f", (_rand_term(rng, depth - 1),))
    return Struct(".", (_rand_term(rng, depth - 1), _rand_term(rng, depth - 1)))


def enum_substs(
    vars: Sequence[str], terms: Sequence[Term], cap: int = 4096
) -> Iterator[dict[Var, Term]]:
    """Cartesian assignments of ground terms to variables, capped."""
    n = 0
    for combo in itertools.product(terms, repeat=len(vars)):
        yield {Var(v): t for v, t in zip(vars, combo)}
        n += 1
        if n >= cap:
            return
