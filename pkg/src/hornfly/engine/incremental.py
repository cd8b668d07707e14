"""Incremental repair of an analysis graph under a module delta.

Deletions (and trust-assertion changes, which can shrink answers) reset
the owning predicate's nodes and everything reachable through reverse
dependency edges, then recompute from bottom. Additions recompute the
owning predicate's nodes and propagate forward monotonically. Edits to
property definitions invalidate the whole graph: their grammars are
global inputs to the abstraction, not ordinary callees.

The result is node-for-node equal to a fresh analysis of the edited
workspace; the equivalence tests enforce exactly that.
"""

from __future__ import annotations

from ..frontend.delta import (
    AddAssertion,
    AddClause,
    AddEntry,
    DelAssertion,
    DelClause,
    Delta,
)
from .fixpoint import Analyzer
from .graph import AnalysisNode, AnalysisResult, CallKey, Stats
from .workspace import Workspace, qkey


def incremental_update(
    prev: AnalysisResult, w_after: Workspace, delta: Delta, should_abort=None
) -> AnalysisResult:
    if delta.module not in w_after.modules and delta.module not in w_after.lib_modules:
        raise ValueError(f"delta for unknown module {delta.module}")
    if delta.is_empty():
        return AnalysisResult(
            domain_id=prev.domain_id,
            nodes=prev.nodes,
            edges=prev.edges,
            entry_keys=list(prev.entry_keys),
            stats=Stats(),
            warnings=list(prev.warnings),
        )

    del_preds, add_preds, touches_props = _classify(w_after, delta)

    result = AnalysisResult(
        domain_id=prev.domain_id,
        nodes={k: AnalysisNode(k, n.lambda_s, dict(n.per_clause), n.status) for k, n in prev.nodes.items()},
        edges=dict(prev.edges),
        entry_keys=[],
        stats=Stats(),
        warnings=[],
    )

    if touches_props:
        invalid = set(result.nodes)
    else:
        invalid = _reverse_closure(result, {k for k in result.nodes if k.pred in del_preds})
    _delete_nodes(result, invalid)

    az = Analyzer(w_after, prev.domain_id, result=result, should_abort=should_abort)
    az.seed_entries()
    for key in sorted(result.nodes, key=CallKey.sort_form):
        if key.pred in add_preds:
            az.enqueue(key)
    az.run()
    _collect_garbage(result)
    return result


def _classify(w: Workspace, delta: Delta) -> tuple[set[str], set[str], bool]:
    """(deletion-style preds, addition-style preds, property-table touched)."""
    del_preds: set[str] = set()
    add_preds: set[str] = set()
    touches_props = False
    props = w.prop_table.props
    for op in delta.ops:
        if isinstance(op, DelClause):
            pred = op.clause_id.pred
            del_preds.add(qkey(delta.module, pred))
            touches_props |= pred in props
        elif isinstance(op, AddClause):
            pred = op.clause.pred
            add_preds.add(qkey(delta.module, pred))
            touches_props |= pred in props
        elif isinstance(op, (AddAssertion, DelAssertion)):
            status, pred = _assertion_status_pred(w, delta, op)
            if pred is not None and pred.split(":", 1)[1] in props:
                touches_props = True
            if status in ("trust", "true") and pred is not None:
                del_preds.add(pred)
    return del_preds, add_preds, touches_props


def _assertion_status_pred(w: Workspace, delta: Delta, op) -> tuple[str, str | None]:
    if isinstance(op, AddAssertion):
        return op.assertion.status, w.resolve(delta.module, op.assertion.pred)
    # deletions carry the id: "module:name/arity@ordinal:status:hash"
    aid = op.assertion_id
    try:
        prefix, status, _digest = aid.rsplit(":", 2)
        pred = prefix.split(":", 1)[1].split("@", 1)[0]
    except (IndexError, ValueError):
        return "trust", None  # unknown shape: invalidate conservatively
    return status, w.resolve(delta.module, pred)


def _reverse_closure(result: AnalysisResult, seeds: set[CallKey]) -> set[CallKey]:
    rev = result.reverse_edges()
    out = set(seeds)
    frontier = list(seeds)
    while frontier:
        k = frontier.pop()
        for caller in rev.get(k, ()):
            if caller not in out:
                out.add(caller)
                frontier.append(caller)
    return out


def _delete_nodes(result: AnalysisResult, keys: set[CallKey]) -> None:
    for k in keys:
        result.nodes.pop(k, None)
    if keys:
        result.edges = {
            e: c for e, c in result.edges.items() if e[0] not in keys and c not in keys
        }


def _collect_garbage(result: AnalysisResult) -> None:
    fwd: dict[CallKey, set[CallKey]] = {}
    for (caller, _c, _p), callee in result.edges.items():
        fwd.setdefault(caller, set()).add(callee)
    reachable: set[CallKey] = set()
    frontier = [k for k in result.entry_keys if k in result.nodes]
    reachable.update(frontier)
    while frontier:
        k = frontier.pop()
        for callee in fwd.get(k, ()):
            if callee not in reachable:
                reachable.add(callee)
                frontier.append(callee)
    dead = set(result.nodes) - reachable
    if dead:
        _delete_nodes(result, dead)
