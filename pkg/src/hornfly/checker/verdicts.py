"""Deciding condition statuses against analysis results.

The sufficient conditions: a calls condition is checked when every
reachable call pattern is below the under-approximation of some
precondition disjunct, and false when some reachable pattern is
abstractly incompatible with every disjunct (the strict mode demands all
patterns be incompatible). Success conditions are checked when every
applicable success pattern is below the postcondition's
under-approximation; a false success verdict additionally requires
concrete evidence of a succeeding call, else it degrades to check.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Callable

from ..adomains import AbstractDomain, Alpha, get_domain
from ..adomains.transfer import goal_args, rename_payload_onto
from ..engine.graph import AnalysisResult, CallKey
from ..engine.workspace import Workspace, split_qkey
from ..frontend.ast import Clause, HcModule, PpLit
from ..frontend.lexer import Span
from ..terms import Term, Var, term_vars
from .conditions import (
    AssertionCondition,
    CallsCond,
    CompCond,
    SuccessCond,
    build_conditions,
)

CHECKED = "checked"
FALSE = "false"
CHECK = "check"

_ORDER = {FALSE: 2, CHECKED: 1, CHECK: 0}


@dataclass(frozen=True, slots=True)
class Witness:
    domain_id: str
    rendering: str
    call_key: CallKey | None = None
    clause_id: str | None = None
    body_pos: int | None = None


@dataclass(frozen=True, slots=True)
class CheckVerdict:
    condition: AssertionCondition | None
    status: str
    witnesses: tuple[Witness, ...] = ()
    notes: tuple[str, ...] = ()
    span: Span | None = None
    pp: tuple[str, int] | None = None  # (clause id, body position) for program points
    pp_module: str = ""
    pp_formula: tuple[Term, ...] = ()

    def cid(self) -> str:
        if self.condition is not None:
            return self.condition.cid()
        return f"pp:{self.pp[0]}:{self.pp[1]}"


@dataclass
class PerDomain:
    domain_id: str
    w: Workspace
    result: AnalysisResult
    domain: AbstractDomain = field(init=False)
    alpha: Alpha = field(init=False)

    def __post_init__(self) -> None:
        self.domain = get_domain(self.domain_id, self.w.prop_table)
        self.alpha = Alpha(self.w.prop_table)

    def node_values(self, qpred: str, head: Term):
        names = [v.name for v in goal_args(head) if isinstance(v, Var)]
        out = []
        for key in sorted((k for k in self.result.nodes if k.pred == qpred), key=CallKey.sort_form):
            node = self.result.nodes[key]
            lam_c = rename_payload_onto(self.domain, key.payload, head)
            lam_s = (
                self.domain.bottom()
                if node.lambda_s == "bottom"
                else rename_payload_onto(self.domain, node.lambda_s, head)
            )
            out.append((key, lam_c, lam_s))
        del names
        return out


def check_calls(
    ctx: PerDomain, c: CallsCond, strict_false: bool = False
) -> CheckVerdict:
    domain, alpha = ctx.domain, ctx.alpha
    names = [v.name for v in goal_args(c.head) if isinstance(v, Var)]
    unders = [alpha.under(domain, pre, names) for pre in c.pre_disjuncts]
    overs = [alpha.over(domain, pre, names) for pre in c.pre_disjuncts]
    nodes = ctx.node_values(c.pred, c.head)
    if not nodes:
        return CheckVerdict(c, CHECKED, notes=("vacuous: no reachable call",), span=c.span)

    all_checked = True
    false_witnesses: list[Witness] = []
    live_nodes = 0
    for key, lam_c, _lam_s in nodes:
        if domain.is_bottom(lam_c) or domain.is_empty_value(lam_c):
            continue
        live_nodes += 1
        if not any(domain.leq(lam_c, u) for u in unders):
            all_checked = False
            if all(domain.incompatible(lam_c, o) for o in overs):
                false_witnesses.append(
                    Witness(ctx.domain_id, domain.render(lam_c), key)
                )
    if live_nodes == 0:
        return CheckVerdict(c, CHECKED, notes=("vacuous: no reachable call",), span=c.span)
    if all_checked:
        return CheckVerdict(c, CHECKED, span=c.span)
    if false_witnesses and (not strict_false or len(false_witnesses) == live_nodes):
        return CheckVerdict(c, FALSE, tuple(false_witnesses), span=c.span)
    return CheckVerdict(c, CHECK, span=c.span)


def check_success(
    ctx: PerDomain,
    c: SuccessCond,
    evidence: Callable[[SuccessCond], bool] | None = None,
) -> CheckVerdict:
    domain, alpha = ctx.domain, ctx.alpha
    names = [v.name for v in goal_args(c.head) if isinstance(v, Var)]
    pre_over = alpha.over(domain, c.pre, names)
    pre_under = alpha.under(domain, c.pre, names)
    post_over = alpha.over(domain, c.post, names)
    post_under = alpha.under(domain, c.post, names)
    nodes = ctx.node_values(c.pred, c.head)
    if not nodes:
        return CheckVerdict(c, CHECKED, notes=("vacuous: no reachable call",), span=c.span)

    all_checked = True
    almost_false: list[Witness] = []
    for key, lam_c, lam_s in nodes:
        if domain.is_bottom(pre_over) or domain.incompatible(lam_c, pre_over):
            continue  # inapplicable in this context
        if domain.leq(lam_s, post_under):
            continue
        all_checked = False
        applicable_surely = not domain.is_bottom(pre_under) and domain.leq(lam_c, pre_under)
        if (
            applicable_surely
            and not domain.is_bottom(lam_s)
            and not domain.is_empty_value(lam_s)
            and domain.incompatible(lam_s, post_over)
        ):
            almost_false.append(Witness(ctx.domain_id, domain.render(lam_s), key))
    if all_checked:
        return CheckVerdict(c, CHECKED, span=c.span)
    if almost_false:
        if evidence is not None and evidence(c):
            return CheckVerdict(c, FALSE, tuple(almost_false), span=c.span)
        return CheckVerdict(
            c,
            CHECK,
            tuple(almost_false),
            notes=("almost-false: abstract contradiction without a concrete success witness",),
            span=c.span,
        )
    return CheckVerdict(c, CHECK, span=c.span)


def check_comp(ctx: PerDomain, c: CompCond) -> CheckVerdict:
    props = ", ".join(sorted({_prop_name(t) for t in c.comp}))
    return CheckVerdict(
        c,
        CHECK,
        notes=(f"computational properties not verified by this tool: {props}",),
        span=c.span,
    )


def _prop_name(t: Term) -> str:
    from ..terms import functor_arity

    name, arity = functor_arity(t) if not isinstance(t, Var) else ("?", 0)
    return f"{name}/{arity}"


def check_program_point(
    ctx: PerDomain, module: str, clause: Clause, pos: int, lit: PpLit
) -> CheckVerdict:
    """A check-status program-point assertion against the stored states."""
    domain, alpha = ctx.domain, ctx.alpha
    qpred = ctx.w.resolve(module, clause.pred)
    states: list[tuple[CallKey, Any]] = []
    for key in sorted((k for k in ctx.result.nodes if k.pred == qpred), key=CallKey.sort_form):
        node = ctx.result.nodes[key]
        saved = node.per_clause.get(str(clause.id))
        if saved is None or pos >= len(saved):
            continue
        states.append((key, saved[pos]))
    if not states:
        return CheckVerdict(
            None,
            CHECKED,
            notes=("unreachable program point",),
            span=lit.span,
            pp=(str(clause.id), pos),
            pp_module=module,
            pp_formula=lit.formula,
        )

    fvars = sorted({v.name for f in lit.formula for v in term_vars(f)})
    all_checked = True
    witnesses: list[Witness] = []
    reachable = 0
    for key, state in states:
        if domain.is_bottom(state) or domain.is_empty_value(state):
            continue  # unreachable under this calling context
        reachable += 1
        proj = domain.restrict(state, fvars)
        under = alpha.under(domain, lit.formula, fvars)
        over = alpha.over(domain, lit.formula, fvars)
        if not domain.is_bottom(under) and domain.leq(proj, under):
            continue
        all_checked = False
        if domain.is_bottom(over) or domain.incompatible(proj, over):
            witnesses.append(
                Witness(ctx.domain_id, domain.render(proj), key, str(clause.id), pos)
            )
    meta = dict(span=lit.span, pp=(str(clause.id), pos), pp_module=module, pp_formula=lit.formula)
    if reachable == 0:
        return CheckVerdict(None, CHECKED, notes=("unreachable program point",), **meta)
    if all_checked:
        return CheckVerdict(None, CHECKED, **meta)
    if witnesses:
        return CheckVerdict(None, FALSE, tuple(witnesses), **meta)
    return CheckVerdict(None, CHECK, **meta)


def combine_verdicts(verdicts: list[CheckVerdict]) -> CheckVerdict:
    """Merge one condition's verdicts across domains: a proof in any
    domain stands (checked), a sound disproof in any domain stands
    (false, which wins on conflict), otherwise check."""
    assert verdicts
    best = verdicts[0]
    notes: list[str] = []
    witnesses: list[Witness] = []
    for v in verdicts:
        notes.extend(v.notes)
        if v.status == FALSE:
            witnesses.extend(v.witnesses)
        if _ORDER[v.status] > _ORDER[best.status]:
            best = v
    if best.status == FALSE:
        return replace(best, witnesses=tuple(witnesses), notes=tuple(dict.fromkeys(notes)))
    return replace(best, notes=tuple(dict.fromkeys(notes)))
