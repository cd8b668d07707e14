"""Clause/assertion-level diffs between two versions of one module.

The diff is minimal-by-clause: clauses pair up by content hash within each
predicate (difflib longest-matching-subsequence, so pure reorderings show
up as del+add). apply_delta is the executable round-trip law used by the
tests and by the engine's invalidation bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass
from difflib import SequenceMatcher

from .ast import Assertion, Clause, ClauseId, EntryDecl, HcModule


@dataclass(frozen=True, slots=True)
class AddClause:
    clause: Clause
    pos: int  # index among the predicate's clauses after deletions


@dataclass(frozen=True, slots=True)
class DelClause:
    clause_id: ClauseId


@dataclass(frozen=True, slots=True)
class AddAssertion:
    assertion: Assertion
    pos: int


@dataclass(frozen=True, slots=True)
class DelAssertion:
    assertion_id: str


@dataclass(frozen=True, slots=True)
class AddEntry:
    entry: EntryDecl
    pos: int


@dataclass(frozen=True, slots=True)
class DelEntry:
    entry: EntryDecl


DeltaOp = AddClause | DelClause | AddAssertion | DelAssertion | AddEntry | DelEntry


@dataclass(frozen=True, slots=True)
class Delta:
    module: str
    ops: tuple[DeltaOp, ...]

    def is_empty(self) -> bool:
        return not self.ops

    def touched_preds(self) -> set[str]:
        out = set()
        for op in self.ops:
            if isinstance(op, AddClause):
                out.add(op.clause.pred)
            elif isinstance(op, DelClause):
                out.add(op.clause_id.pred)
        return out


def diff_modules(old: HcModule, new: HcModule) -> Delta:
    if old.name != new.name:
        raise ValueError(f"module name mismatch: {old.name} vs {new.name}")
    ops: list[DeltaOp] = []

    for pred in sorted(set(old.preds) | set(new.preds)):
        a = list(old.preds.get(pred, ()))
        b = list(new.preds.get(pred, ()))
        kept_a, kept_b = _match([c.id.hash for c in a], [c.id.hash for c in b])
        for i, c in enumerate(a):
            if i not in kept_a:
                ops.append(DelClause(c.id))
        # positions index the post-deletion clause list; ascending inserts
        # land each new clause exactly where it sits in the new version
        for j, c in enumerate(b):
            if j not in kept_b:
                ops.append(AddClause(c, j))

    old_asrt = {x.content_key(): x for x in old.assertions}
    new_asrt = {x.content_key(): x for x in new.assertions}
    for key, x in old_asrt.items():
        if key not in new_asrt:
            ops.append(DelAssertion(x.id))
    for pos, x in enumerate(new.assertions):
        if x.content_key() not in old_asrt:
            ops.append(AddAssertion(x, pos))

    old_ent = {e.content_key(): e for e in old.entries}
    new_ent = {e.content_key(): e for e in new.entries}
    for key, e in old_ent.items():
        if key not in new_ent:
            ops.append(DelEntry(e))
    for pos, e in enumerate(new.entries):
        if e.content_key() not in old_ent:
            ops.append(AddEntry(e, pos))

    return Delta(old.name, tuple(ops))


def _match(a: list[str], b: list[str]) -> tuple[set[int], set[int]]:
    sm = SequenceMatcher(a=a, b=b, autojunk=False)
    kept_a: set[int] = set()
    kept_b: set[int] = set()
    for blk in sm.get_matching_blocks():
        for k in range(blk.size):
            kept_a.add(blk.a + k)
            kept_b.add(blk.b + k)
    return kept_a, kept_b


def apply_delta(old: HcModule, delta: Delta) -> HcModule:
    """Replays a Delta onto a module. Clause ids are re-derived afterwards so
    ordinals stay consistent with the rebuilt clause lists."""
    if delta.module != old.name:
        raise ValueError(f"delta for module {delta.module} applied to {old.name}")

    preds: dict[str, list[Clause]] = {k: list(v) for k, v in old.preds.items()}
    assertions = list(old.assertions)
    entries = list(old.entries)

    known_ids = {c.id for cs in preds.values() for c in cs}
    for op in delta.ops:
        if isinstance(op, DelClause):
            if op.clause_id not in known_ids:
                raise ValueError(f"delta deletes unknown clause {op.clause_id}")
    del known_ids

    dels = [op for op in delta.ops if isinstance(op, DelClause)]
    adds = [op for op in delta.ops if isinstance(op, AddClause)]
    for op in dels:
        lst = preds.get(op.clause_id.pred, [])
        for i, c in enumerate(lst):
            if c.id == op.clause_id:
                del lst[i]
                break
        else:
            raise ValueError(f"delta deletes unknown clause {op.clause_id}")
    for op in sorted(adds, key=lambda o: o.pos):
        lst = preds.setdefault(op.clause.pred, [])
        lst.insert(min(op.pos, len(lst)), op.clause)

    for op in delta.ops:
        if isinstance(op, DelAssertion):
            assertions = [x for x in assertions if x.id != op.assertion_id]
    for op in sorted(
        (op for op in delta.ops if isinstance(op, AddAssertion)), key=lambda o: o.pos
    ):
        assertions.insert(min(op.pos, len(assertions)), op.assertion)

    for op in delta.ops:
        if isinstance(op, DelEntry):
            entries = [e for e in entries if e.content_key() != op.entry.content_key()]
    for op in sorted((op for op in delta.ops if isinstance(op, AddEntry)), key=lambda o: o.pos):
        entries.insert(min(op.pos, len(entries)), op.entry)

    # re-derive ordinals (and drop now-empty predicates)
    hash_counts: dict[tuple[str, str], int] = {}
    rebuilt: dict[str, tuple[Clause, ...]] = {}
    for pred, lst in preds.items():
        if not lst:
            continue
        out = []
        for c in lst:
            n = hash_counts.get((pred, c.id.hash), 0)
            hash_counts[(pred, c.id.hash)] = n + 1
            out.append(Clause(ClauseId(old.name, pred, c.id.hash, n), c.head, c.body, c.span))
        rebuilt[pred] = tuple(out)

    exports = old.exports
    return HcModule(
        name=old.name,
        path=old.path,
        exports=exports,
        imports=old.imports,
        preds=rebuilt,
        assertions=tuple(assertions),
        entries=tuple(entries),
        prop_decls=old.prop_decls,
    )
