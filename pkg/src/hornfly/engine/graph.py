"""The analysis graph: call-pattern-keyed nodes plus dependency edges."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from ..diags import Diagnostic

COMPLETE = "complete"
FIXPOINTING = "fixpointing"
INVALID = "invalid"


@dataclass(frozen=True, slots=True)
class CallKey:
    pred: str  # qualified: "module:name/arity"
    payload: Any  # canonical lambda-c (hashable, positional)

    def arity(self) -> int:
        return int(self.pred.rsplit("/", 1)[1])

    def sort_form(self) -> tuple:
        return (self.pred, repr(self.payload))


@dataclass(slots=True)
class AnalysisNode:
    key: CallKey
    lambda_s: Any = "bottom"  # canonical payload over head positions
    per_clause: dict[str, tuple] = field(default_factory=dict)  # clauseId -> states
    status: str = FIXPOINTING


@dataclass(slots=True)
class Stats:
    nodes_created: int = 0
    nodes_recomputed: int = 0
    iterations: int = 0

    def to_json(self) -> dict:
        return {
            "nodesCreated": self.nodes_created,
            "nodesRecomputed": self.nodes_recomputed,
            "iterations": self.iterations,
        }


@dataclass(slots=True)
class AnalysisResult:
    domain_id: str
    nodes: dict[CallKey, AnalysisNode] = field(default_factory=dict)
    edges: dict[tuple[CallKey, str, int], CallKey] = field(default_factory=dict)
    entry_keys: list[CallKey] = field(default_factory=list)
    stats: Stats = field(default_factory=Stats)
    warnings: list[Diagnostic] = field(default_factory=list)

    def nodes_for(self, pred: str) -> list[AnalysisNode]:
        return [n for k, n in self.nodes.items() if k.pred == pred]

    def reverse_edges(self) -> dict[CallKey, set[CallKey]]:
        rev: dict[CallKey, set[CallKey]] = {}
        for (caller, _cid, _pos), callee in self.edges.items():
            rev.setdefault(callee, set()).add(caller)
        return rev

    def callers_of(self, key: CallKey) -> set[CallKey]:
        return {caller for (caller, _c, _p), callee in self.edges.items() if callee == key}

    def edges_from(self, key: CallKey) -> list[tuple[tuple[CallKey, str, int], CallKey]]:
        return [(e, c) for e, c in self.edges.items() if e[0] == key]

    def graph_equal(self, other: "AnalysisResult") -> bool:
        """Node-for-node equality: keys, lambda-s, edges, entry set."""
        if self.domain_id != other.domain_id:
            return False
        if set(self.nodes) != set(other.nodes):
            return False
        for k, n in self.nodes.items():
            if n.lambda_s != other.nodes[k].lambda_s:
                return False
        if self.edges != other.edges:
            return False
        return sorted(k.sort_form() for k in self.entry_keys) == sorted(
            k.sort_form() for k in other.entry_keys
        )

    def diff_summary(self, other: "AnalysisResult") -> str:
        lines = []
        mine, theirs = set(self.nodes), set(other.nodes)
        for k in sorted(mine - theirs, key=CallKey.sort_form):
            lines.append(f"only-left node {k.pred} {k.payload!r}")
        for k in sorted(theirs - mine, key=CallKey.sort_form):
            lines.append(f"only-right node {k.pred} {k.payload!r}")
        for k in sorted(mine & theirs, key=CallKey.sort_form):
            if self.nodes[k].lambda_s != other.nodes[k].lambda_s:
                lines.append(
                    f"lambda-s differs at {k.pred} {k.payload!r}: "
                    f"{self.nodes[k].lambda_s!r} vs {other.nodes[k].lambda_s!r}"
                )
        if self.edges != other.edges:
            sl, ol = set(self.edges.items()), set(other.edges.items())
            for e in sorted(sl ^ ol, key=repr)[:10]:
                lines.append(f"edge differs: {e!r}")
        return "\n".join(lines) or "equal"
