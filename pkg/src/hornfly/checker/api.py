"""Checker orchestration: conditions x domains -> combined verdicts."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..engine.graph import AnalysisResult
from ..engine.workspace import Workspace
from ..frontend.ast import PpLit
from .conditions import CallsCond, CompCond, SuccessCond, build_conditions
from .evidence import OracleEvidence
from .verdicts import (
    CheckVerdict,
    PerDomain,
    check_calls,
    check_comp,
    check_program_point,
    check_success,
    combine_verdicts,
)


@dataclass
class CheckerConfig:
    domains: tuple[str, ...] = ("modes", "pairsh", "regtypes")
    incremental: bool = True
    strict_false: bool = False
    entry_policy: str = "exports-top"
    db_dir: str | None = None
    oracle_evidence: bool = False
    oracle_depth: int = 6
    inactivity_debounce_ms: int = 300

    def __post_init__(self) -> None:
        if not self.domains:
            raise ValueError("at least one domain must be selected")

    def to_json(self) -> dict:
        return {
            "domains": list(self.domains),
            "incremental": self.incremental,
            "strictFalse": self.strict_false,
            "entryPolicy": self.entry_policy,
            "dbDir": self.db_dir,
            "oracleEvidence": self.oracle_evidence,
            "inactivityDebounceMs": self.inactivity_debounce_ms,
        }


def check_workspace(
    w: Workspace,
    results: dict[str, AnalysisResult],
    config: CheckerConfig | None = None,
) -> list[CheckVerdict]:
    config = config or CheckerConfig()
    ctxs = [PerDomain(d, w, results[d]) for d in config.domains if d in results]
    if not ctxs:
        return []
    evidence = OracleEvidence(w, config.oracle_depth) if config.oracle_evidence else None

    verdicts: list[CheckVerdict] = []
    for qpred in sorted(w.assertion_index()):
        conds = build_conditions(qpred, w.assertion_index()[qpred])
        for cond in conds:
            if isinstance(cond, CompCond):
                verdicts.append(check_comp(ctxs[0], cond))
                continue
            per_domain: list[CheckVerdict] = []
            for ctx in ctxs:
                if isinstance(cond, CallsCond):
                    per_domain.append(check_calls(ctx, cond, config.strict_false))
                else:
                    assert isinstance(cond, SuccessCond)
                    per_domain.append(check_success(ctx, cond, evidence))
            verdicts.append(combine_verdicts(per_domain))

    for name in sorted(w.modules):
        m = w.modules[name]
        for pred in sorted(m.preds):
            for clause in m.preds[pred]:
                for pos, lit in enumerate(clause.body):
                    if isinstance(lit, PpLit) and lit.status == "check":
                        per_domain = [
                            check_program_point(ctx, name, clause, pos, lit) for ctx in ctxs
                        ]
                        verdicts.append(combine_verdicts(per_domain))
    return verdicts
