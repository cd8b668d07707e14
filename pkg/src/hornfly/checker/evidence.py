"""Concrete evidence for near-false success verdicts.

Samples admissible entry instantiations (terms satisfying the entry
preconditions under the bounded interpreter), runs them, and looks for a
succeeding call matching a condition's precondition. Only used when the
oracle is enabled (tests, CI, --oracle flag); the daemon default keeps
near-false verdicts at check.
"""

from __future__ import annotations

import itertools

from ..engine.workspace import Workspace
from ..frontend.ast import EntryDecl
from ..oracle import Interpreter, Trace, find_success_witness
from ..oracle.unify import resolve
from ..terms import Atom, Struct, Term, Var, term_vars
from .conditions import SuccessCond

MAX_INSTANCES_PER_ENTRY = 6


def _curated_pool(w: Workspace) -> list[Term]:
    """Small, type-diverse pool: literals plus one shallow witness per
    declared regtype (built by running its clauses generatively)."""
    from ..frontend.reader import read_term

    seeds = [
        "[]", "[a]", "[a,b]", "[1]", "[1,2,3]", "[red]", "[red,green]",
        "a", "b", "red", "0", "1", "2", "f(a)", "[[1],[2]]", "[f(a)]",
    ]
    pool = [read_term(t).term for t in seeds]
    seen = {str(t) for t in pool}
    for key in w.prop_table.env.order:
        name, arity = key.split("/")
        if int(arity) != 1:
            continue
        goal = Struct(name, (Var("G"),))
        tr = Interpreter(w, 5).run(goal, w.root)
        for sol in tr.solutions()[:3]:
            t = sol.args[0]
            if not term_vars(t) and str(t) not in seen:
                seen.add(str(t))
                pool.append(t)
    return pool


def entry_queries(w: Workspace, per_entry: int = MAX_INSTANCES_PER_ENTRY) -> list[tuple[str, Term]]:
    """(module, ground-ish query) samples satisfying each entry's pre.

    Free-marked variables stay unbound; the rest iterate over a per
    variable candidate pool filtered by the entry preconditions."""
    out: list[tuple[str, Term]] = []
    pool = _curated_pool(w)
    interp = Interpreter(w, 32, record=False)
    for module, e in _entries(w):
        vars_ = list(term_vars(e.head))
        if not vars_ or not e.pre:
            out.append((module, e.head))
            continue
        free_names = set()
        for lit in e.pre:
            if _free_literal(lit, {}):
                free_names.add(lit.args[0].name)
        per_var_pools = [
            [None] if v.name in free_names else pool for v in vars_
        ]
        found = 0
        for combo in itertools.product(*per_var_pools):
            s = {v: t for v, t in zip(vars_, combo) if t is not None}
            ok = True
            for lit in e.pre:
                if _free_literal(lit, s):
                    continue
                goal = resolve(lit, s)
                holds, decided = interp.provable(goal, {}, module)
                if not (holds and decided):
                    ok = False
                    break
            if ok:
                out.append((module, resolve(e.head, s)))
                found += 1
                if found >= per_entry:
                    break
    return out


def _free_literal(lit: Term, s: dict) -> bool:
    """var(X) literals are satisfied by leaving X unbound."""
    if isinstance(lit, Struct) and lit.functor == "var" and len(lit.args) == 1:
        arg = lit.args[0]
        if isinstance(arg, Var):
            return True
    return False


def _blank_frees(pre, s: dict) -> dict:
    out = dict(s)
    for lit in pre:
        if _free_literal(lit, out):
            out.pop(lit.args[0], None)
    return out


def _entries(w: Workspace):
    entries = w.entries()
    if entries:
        return entries
    root = w.root_module()
    if root is None:
        return []
    out = []
    for pred in root.exports:
        if pred not in root.preds:
            continue
        name, arity = pred.rsplit("/", 1)
        vs = tuple(Var(f"Q{i}") for i in range(int(arity)))
        head: Term = Struct(name, vs) if vs else Atom(name)
        out.append((root.name, EntryDecl(head, ())))
    return out


class OracleEvidence:
    """Caches entry-driven traces and answers success-evidence queries."""

    def __init__(self, w: Workspace, depth: int = 6):
        self.w = w
        self.depth = depth
        self._traces: list[tuple[str, Trace]] | None = None

    def traces(self) -> list[tuple[str, Trace]]:
        if self._traces is None:
            self._traces = []
            for module, q in entry_queries(self.w):
                tr = Interpreter(self.w, self.depth).run(q, module)
                self._traces.append((module, tr))
        return self._traces

    def __call__(self, c: SuccessCond) -> bool:
        for module, tr in self.traces():
            if find_success_witness(self.w, c.head, c.pre, [tr], module) is not None:
                return True
        return False
