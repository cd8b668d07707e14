"""Workspace: the set of modules under analysis plus the library specs.

Predicate identity is module-qualified ("module:name/arity"). Resolution
follows: local definition, then imports in declaration order, then the
bundled library modules, then the builtin table.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..adomains import Alpha, PropTable
from ..frontend.ast import Assertion, Clause, EntryDecl, HcModule
from ..terms import Term, functor_arity

BUILTIN_PREDS = {
    "=/2",
    "is/2",
    "</2",
    ">/2",
    "=</2",
    ">=/2",
    "=:=/2",
    "=\\=/2",
    "==/2",
    "\\==/2",
    "@</2",
    "@=</2",
    "@>/2",
    "@>=/2",
    "true/0",
    "fail/0",
    "indep/2",
    "var/1",
    "nonvar/1",
    "ground/1",
    "num/1",
    "atm/1",
    "atom/1",
    "number/1",
    "int/1",
    "call/1",
    "call/2",
    "call/3",
    "rtcheck_pre/1",
    "rtcheck_post/2",
}

BUILTIN_MODULE = "$builtins"


def qkey(module: str, pred: str) -> str:
    return f"{module}:{pred}"


def split_qkey(q: str) -> tuple[str, str]:
    module, pred = q.split(":", 1)
    return module, pred


@dataclass
class Workspace:
    modules: dict[str, HcModule]
    lib_modules: dict[str, HcModule] = field(default_factory=dict)
    root: str = ""

    def __post_init__(self) -> None:
        if not self.root and self.modules:
            self.root = next(iter(self.modules))
        self.prop_table = PropTable()
        for m in list(self.lib_modules.values()) + list(self.modules.values()):
            self.prop_table.add_module(m)
        self.alpha = Alpha(self.prop_table)
        self._resolution: dict[tuple[str, str], str] = {}
        self._assertion_index: dict[str, list[tuple[str, Assertion]]] = {}
        for name, m in self.all_modules().items():
            for a in m.assertions:
                q = self.resolve(name, a.pred)
                self._assertion_index.setdefault(q, []).append((name, a))

    # -- module access ---------------------------------------------------

    def all_modules(self) -> dict[str, HcModule]:
        out = dict(self.lib_modules)
        out.update(self.modules)
        return out

    def module(self, name: str) -> HcModule | None:
        return self.modules.get(name) or self.lib_modules.get(name)

    # -- resolution --------------------------------------------------------

    def resolve(self, module: str, pred: str) -> str:
        """Resolve a pred key used inside `module` to a qualified key."""
        memo_key = (module, pred)
        if memo_key in self._resolution:
            return self._resolution[memo_key]
        out = self._resolve(module, pred)
        self._resolution[memo_key] = out
        return out

    def _resolve(self, module: str, pred: str) -> str:
        m = self.module(module)
        if m is not None and pred in m.preds:
            return qkey(module, pred)
        if m is not None:
            for imp_name, restriction in m.imports:
                imp = self.module(imp_name)
                if imp is None:
                    continue
                visible = restriction if restriction is not None else imp.exports
                if pred in visible and pred in imp.preds:
                    return qkey(imp_name, pred)
                if pred in visible and self._has_assertions(imp, pred):
                    return qkey(imp_name, pred)
        for lib_name, lib in self.lib_modules.items():
            if lib_name == module:
                continue
            if pred in lib.preds or self._has_assertions(lib, pred):
                return qkey(lib_name, pred)
        if pred in BUILTIN_PREDS:
            return qkey(BUILTIN_MODULE, pred)
        # unresolved: qualify locally so the engine can attach a top node
        return qkey(module, pred)

    @staticmethod
    def _has_assertions(m: HcModule, pred: str) -> bool:
        return any(a.pred == pred for a in m.assertions)

    def resolve_goal(self, module: str, goal: Term) -> str:
        name, arity = functor_arity(goal)
        return self.resolve(module, f"{name}/{arity}")

    # -- qualified lookups -------------------------------------------------

    def clauses(self, q: str) -> tuple[Clause, ...]:
        module, pred = split_qkey(q)
        m = self.module(module)
        if m is None:
            return ()
        return m.preds.get(pred, ())

    def assertions_for(self, q: str) -> list[Assertion]:
        return [a for _, a in self._assertion_index.get(q, [])]

    def assertion_index(self) -> dict[str, list[tuple[str, Assertion]]]:
        """Qualified pred -> [(defining module, assertion)]."""
        return self._assertion_index

    def trust_assertions_for(self, q: str) -> list[Assertion]:
        return [a for a in self.assertions_for(q) if a.status in ("trust", "true")]

    def entries(self) -> list[tuple[str, EntryDecl]]:
        out = []
        for name, m in self.modules.items():
            for e in m.entries:
                out.append((name, e))
        return out

    def root_module(self) -> HcModule | None:
        return self.modules.get(self.root)
