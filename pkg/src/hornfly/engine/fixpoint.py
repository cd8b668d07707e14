"""Goal-dependent fixpoint computation over the analysis graph.

Chaotic iteration on a FIFO worklist with deterministic tie-breaking.
Success patterns only move up the lattice within a run (deletion repair
resets nodes first, see incremental.py), and every stored pattern is
normalized into the domain's widened sublattice, which makes the least
fixpoint independent of iteration order - the property the incremental
equivalence tests lean on.
"""

from __future__ import annotations

from collections import deque
from typing import Any, Callable

from ..adomains import AbstractDomain, Alpha, get_domain
from ..adomains.transfer import (
    entry_value,
    exit_payload,
    extend_with_success,
    goal_args,
    payload_lub,
    project_call,
    rename_payload_onto,
    unify_terms,
)
from ..diags import Diagnostic
from ..frontend.ast import CallLit, Clause, EntryDecl, PpLit
from ..frontend.lexer import ZERO_SPAN
from ..terms import Atom, Struct, Term, Var, functor_arity, term_vars
from .graph import COMPLETE, FIXPOINTING, AnalysisNode, AnalysisResult, CallKey
from .workspace import BUILTIN_MODULE, Workspace, split_qkey

CONTEXT_CAP = 16
MAX_COMPUTES_PER_CLAUSE = 200
MIN_COMPUTE_CEILING = 20000

_NOP_BUILTINS = {
    "true/0",
    "==/2",
    "\\==/2",
    "@</2",
    "@=</2",
    "@>/2",
    "@>=/2",
    "indep/2",
}
_TEST_PROPS = {"var/1", "nonvar/1", "ground/1", "num/1", "atm/1", "atom/1", "number/1", "int/1"}
_ARITH_TESTS = {"</2", ">/2", "=</2", ">=/2", "=:=/2", "=\\=/2"}


class EngineError(Exception):
    pass


class AnalysisAborted(Exception):
    pass


class Analyzer:
    def __init__(
        self,
        w: Workspace,
        domain_id: str,
        result: AnalysisResult | None = None,
        should_abort: Callable[[], bool] | None = None,
    ):
        self.w = w
        self.domain_id = domain_id
        self.domain: AbstractDomain = get_domain(domain_id, w.prop_table)
        self.alpha = Alpha(w.prop_table)
        self.result = result if result is not None else AnalysisResult(domain_id)
        self.should_abort = should_abort
        self.queue: deque[CallKey] = deque()
        self.queued: set[CallKey] = set()
        self._out: dict[CallKey, set[tuple[CallKey, str, int]]] = {}
        self._rev: dict[CallKey, set[CallKey]] = {}
        self._preds_index: dict[str, list[CallKey]] = {}
        for edge, callee in self.result.edges.items():
            self._out.setdefault(edge[0], set()).add(edge)
            self._rev.setdefault(callee, set()).add(edge[0])
        for key in self.result.nodes:
            self._preds_index.setdefault(key.pred, []).append(key)
        n_clauses = sum(
            len(cs) for m in w.all_modules().values() for cs in m.preds.values()
        )
        self.compute_ceiling = max(MIN_COMPUTE_CEILING, MAX_COMPUTES_PER_CLAUSE * n_clauses)

    # -- public ----------------------------------------------------------

    def seed_entries(self) -> None:
        seen: set[CallKey] = set(self.result.entry_keys)
        for module, e in self._entry_decls():
            key = self._entry_key(module, e)
            if key is None:
                continue
            if key not in seen:
                self.result.entry_keys.append(key)
                seen.add(key)
            self._ensure_node(key)

    def run(self) -> AnalysisResult:
        computes = 0
        while self.queue:
            if self.should_abort is not None and self.should_abort():
                raise AnalysisAborted()
            key = self.queue.popleft()
            self.queued.discard(key)
            self.result.stats.iterations += 1
            computes += 1
            if computes > self.compute_ceiling:
                raise EngineError(
                    f"fixpoint iteration ceiling hit ({self.compute_ceiling})"
                )
            self._compute(key)
        for node in self.result.nodes.values():
            node.status = COMPLETE
        return self.result

    def enqueue(self, key: CallKey) -> None:
        self._enqueue(key)

    # -- seeding -----------------------------------------------------------

    def _entry_decls(self) -> list[tuple[str, EntryDecl]]:
        entries = self.w.entries()
        if entries:
            return entries
        root = self.w.root_module()
        if root is None:
            return []
        out = []
        for pred in root.exports:
            if pred not in root.preds:
                continue
            name, arity = pred.rsplit("/", 1)
            vs = tuple(Var(f"E{i}") for i in range(int(arity)))
            head: Term = Struct(name, vs) if vs else Atom(name)
            out.append((root.name, EntryDecl(head, ())))
        return out

    def _entry_key(self, module: str, e: EntryDecl) -> CallKey | None:
        name, arity = functor_arity(e.head)
        q = self.w.resolve(module, f"{name}/{arity}")
        names = [a.name for a in goal_args(e.head) if isinstance(a, Var)]
        if len(names) != arity:
            return None
        val = self.alpha.over(self.domain, e.pre, names)
        payload = self.domain.to_key(val, names)
        return CallKey(q, payload)

    # -- node management ----------------------------------------------------

    def _ensure_node(self, key: CallKey) -> AnalysisNode:
        node = self.result.nodes.get(key)
        if node is not None:
            return node
        node = AnalysisNode(key)
        self.result.nodes[key] = node
        self._preds_index.setdefault(key.pred, []).append(key)
        self.result.stats.nodes_created += 1
        clauses = self.w.clauses(key.pred)
        if clauses:
            self._enqueue(key)
        else:
            node.lambda_s = self._leaf_success(key)
            node.status = COMPLETE
        return node

    def _leaf_success(self, key: CallKey) -> Any:
        """Success pattern for a predicate without clauses: trust assertions
        when available, else top plus a warning for non-builtins."""
        domain = self.domain
        names = [f"$c{i}" for i in range(key.arity())]
        module, pred = split_qkey(key.pred)
        lam_c = domain.from_key(key.payload, names)
        if domain.is_bottom(lam_c):
            return "bottom"
        trusts = [a for a in self.w.trust_assertions_for(key.pred) if a.post or a.pre]
        val = domain.top(names)
        for a in trusts:
            head_names = [v.name for v in goal_args(a.head)]
            ren = dict(zip(head_names, names))
            if a.pre:
                pre_over = self.alpha.over(domain, tuple(_rename_formula(a.pre, ren)), names)
                if domain.incompatible(lam_c, pre_over):
                    continue
            if a.post:
                post_over = self.alpha.over(domain, tuple(_rename_formula(a.post, ren)), names)
                val = domain.refine(val, post_over)
        if not trusts and module != BUILTIN_MODULE:
            self.result.warnings.append(
                Diagnostic(
                    module,
                    ZERO_SPAN,
                    "warning",
                    f"no clauses, trust assertion, or builtin entry for {pred}; assuming top",
                    "unresolved",
                )
            )
        val = domain.refine(val, domain.instantiation_closure(lam_c))
        return domain.to_key(val, names)

    def _enqueue(self, key: CallKey) -> None:
        if key not in self.queued:
            self.queue.append(key)
            self.queued.add(key)

    # -- edge bookkeeping ----------------------------------------------------

    def _clear_outgoing(self, key: CallKey) -> None:
        edges = self._out.pop(key, set())
        callees = set()
        for edge in edges:
            callee = self.result.edges.pop(edge, None)
            if callee is not None:
                callees.add(callee)
        for callee in callees:
            callers = self._rev.get(callee)
            if callers is not None:
                callers.discard(key)

    def _add_edge(self, edge: tuple[CallKey, str, int], callee: CallKey) -> None:
        self.result.edges[edge] = callee
        self._out.setdefault(edge[0], set()).add(edge)
        self._rev.setdefault(callee, set()).add(edge[0])

    # -- the transfer of one node ------------------------------------------

    def _compute(self, key: CallKey) -> None:
        node = self.result.nodes.get(key)
        if node is None:
            return
        clauses = self.w.clauses(key.pred)
        if not clauses:
            return
        domain = self.domain
        self.result.stats.nodes_recomputed += 1
        node.status = FIXPOINTING
        module, _pred = split_qkey(key.pred)
        self._clear_outgoing(key)

        new_lambda: Any = "bottom"
        per_clause: dict[str, tuple] = {}
        for clause in clauses:
            exit_state, states = self._traverse_clause(key, clause, module)
            per_clause[str(clause.id)] = tuple(states)
            if not domain.is_bottom(exit_state) and not domain.is_empty_value(exit_state):
                contribution = exit_payload(domain, exit_state, clause.head)
                new_lambda = (
                    contribution
                    if new_lambda == "bottom"
                    else payload_lub(domain, new_lambda, contribution, key.arity())
                )

        node.per_clause = per_clause
        old = node.lambda_s
        final = self._store_form(old, new_lambda, key.arity())
        node.status = COMPLETE
        if final != old:
            node.lambda_s = final
            # self-recursive nodes re-enqueue themselves until stable
            for caller in sorted(self._rev.get(key, ()), key=CallKey.sort_form):
                self._enqueue(caller)

    def _store_form(self, old: Any, new: Any, arity: int) -> Any:
        domain = self.domain
        names = [f"$c{i}" for i in range(arity)]
        new_v = domain.from_key(new, names) if new != "bottom" else domain.bottom()
        new_v = self._normalize(new_v)
        if domain.is_bottom(new_v):
            return old if old != "bottom" else "bottom"
        if old == "bottom":
            return domain.to_key(new_v, names)
        old_v = domain.from_key(old, names)
        if domain.leq(new_v, old_v):
            return old
        widened = self._normalize(domain.widen(old_v, new_v))
        return domain.to_key(widened, names)

    def _normalize(self, v: Any) -> Any:
        """Keep stored values inside the widened sublattice so the fixpoint
        is unique regardless of iteration order."""
        domain = self.domain
        if domain.is_bottom(v):
            return v
        if self.domain_id == "regtypes":
            env = domain.env  # type: ignore[attr-defined]
            types = [env.collapse(t, domain.WIDEN_DEPTH) for t in v.types]  # type: ignore[attr-defined]
            return domain._mk(v.vars, types)  # type: ignore[attr-defined]
        return v

    def _traverse_clause(self, key: CallKey, clause: Clause, module: str):
        domain = self.domain
        state = entry_value(domain, key.payload, clause.head)
        head_vars = {v.name for v in clause.head_vars()}
        locals_: list[str] = []
        seen = set(head_vars)
        for lit in clause.body:
            goals = [lit.goal] if isinstance(lit, CallLit) else list(lit.formula)
            for g in goals:
                for v in term_vars(g):
                    if v.name not in seen:
                        seen.add(v.name)
                        locals_.append(v.name)
        if locals_ and not domain.is_bottom(state):
            state = domain.combine(state, domain.fresh(locals_))

        states: list[Any] = []
        for pos, lit in enumerate(clause.body):
            if not domain.is_bottom(state) and domain.is_empty_value(state):
                state = domain.bottom()
            states.append(state)
            if domain.is_bottom(state):
                continue
            if isinstance(lit, PpLit):
                if lit.status in ("trust", "true"):
                    over = self.alpha.over(domain, lit.formula, domain.vars_of(state))
                    state = domain.bottom() if domain.is_bottom(over) else domain.refine(state, over)
                continue
            state = self._transfer_call(key, clause, pos, lit.goal, state, module)
        state = self._reexecute_unifications(clause, state, module)
        if not domain.is_bottom(state) and domain.is_empty_value(state):
            state = domain.bottom()
        return state, states

    def _reexecute_unifications(self, clause: Clause, state: Any, module: str) -> Any:
        """Re-apply edge-free literals (=, type tests, arithmetic) to the exit
        state. Unification is concretely idempotent, so this is a sound local
        refinement; it recovers output-argument precision lost when a head
        unification ran before the call that instantiated its variables."""
        domain = self.domain
        for _ in range(2):
            if domain.is_bottom(state):
                return state
            prev = state
            for lit in clause.body:
                if not isinstance(lit, CallLit) or isinstance(lit.goal, Var):
                    continue
                name, arity = functor_arity(lit.goal)
                pred = f"{name}/{arity}"
                if pred == "=/2":
                    state = unify_terms(domain, state, lit.goal.args[0], lit.goal.args[1])
                elif (
                    pred in _TEST_PROPS or pred in _ARITH_TESTS or pred == "is/2"
                ) and split_qkey(self.w.resolve(module, pred))[0] == BUILTIN_MODULE:
                    state = self._builtin_transfer(pred, name, lit.goal, state, module, clause)
                if domain.is_bottom(state):
                    return state
            if domain.equal(prev, state):
                break
        return state

    def _transfer_call(
        self, key: CallKey, clause: Clause, pos: int, goal: Term, state: Any, module: str
    ) -> Any:
        domain = self.domain
        if isinstance(goal, Var):
            self.result.warnings.append(
                Diagnostic(
                    module,
                    clause.span,
                    "warning",
                    "call through an unbound variable loses all precision",
                    "metacall",
                )
            )
            return domain.top(domain.vars_of(state))
        name, arity = functor_arity(goal)
        pred = f"{name}/{arity}"
        if pred == "=/2":
            return unify_terms(domain, state, goal.args[0], goal.args[1])
        if pred == "fail/0":
            return domain.bottom()
        q = self.w.resolve(module, pred)
        q_module, _ = split_qkey(q)
        if q_module == BUILTIN_MODULE:
            return self._builtin_transfer(pred, name, goal, state, module, clause)

        payload = project_call(domain, state, goal)
        if payload == "bottom":
            return domain.bottom()
        callee = self._callee_key(q, payload)
        self._add_edge((key, str(clause.id), pos), callee)
        cnode = self._ensure_node(callee)
        if cnode.lambda_s == "bottom":
            return domain.bottom()
        return extend_with_success(domain, state, goal, cnode.lambda_s)

    def _builtin_transfer(self, pred, name, goal, state, module, clause):
        domain = self.domain
        if pred in _NOP_BUILTINS:
            return state
        if pred in _TEST_PROPS:
            over = self.alpha.over(domain, (goal,), domain.vars_of(state))
            return domain.bottom() if domain.is_bottom(over) else domain.refine(state, over)
        if pred == "is/2":
            x, expr = goal.args
            lits: list[Term] = [Struct("ground", (expr,))] if term_vars(expr) else []
            lits.append(Struct("ground", (x,)))
            if isinstance(x, Var):
                lits.append(Struct("num", (x,)))
            over = self.alpha.over(domain, tuple(lits), domain.vars_of(state))
            return domain.bottom() if domain.is_bottom(over) else domain.refine(state, over)
        if pred in _ARITH_TESTS:
            lits = [Struct("ground", (a,)) for a in goal.args if term_vars(a)]
            if not lits:
                return state
            over = self.alpha.over(domain, tuple(lits), domain.vars_of(state))
            return domain.bottom() if domain.is_bottom(over) else domain.refine(state, over)
        if name == "call":
            self.result.warnings.append(
                Diagnostic(module, clause.span, "warning", "higher-order call treated as top", "metacall")
            )
            return domain.top(domain.vars_of(state))
        return state  # rtcheck markers and anything else: no abstract effect

    def _callee_key(self, q: str, payload: Any) -> CallKey:
        key = CallKey(q, payload)
        if key in self.result.nodes:
            return key
        existing = self._preds_index.get(q, [])
        if len(existing) < CONTEXT_CAP or not self.w.clauses(q):
            return key
        domain = self.domain
        arity = key.arity()
        for k in sorted(existing, key=CallKey.sort_form):
            merged = payload_lub(domain, payload, k.payload, arity)
            if merged == k.payload:
                return k  # covered by an existing context
        first = min(existing, key=CallKey.sort_form)
        merged = payload_lub(domain, payload, first.payload, arity)
        return CallKey(q, merged)


def _rename_formula(formula, mapping: dict[str, str]):
    return [_rename_term_names(lit, mapping) for lit in formula]


def _rename_term_names(t: Term, mapping: dict[str, str]) -> Term:
    if isinstance(t, Var):
        return Var(mapping.get(t.name, t.name))
    if isinstance(t, Struct):
        return Struct(t.functor, tuple(_rename_term_names(a, mapping) for a in t.args))
    return t


def analyze(
    w: Workspace, domain_id: str, should_abort: Callable[[], bool] | None = None
) -> AnalysisResult:
    az = Analyzer(w, domain_id, should_abort=should_abort)
    az.seed_entries()
    return az.run()


def lookup_renamed(result: AnalysisResult, w: Workspace, module: str, goal: Term):
    """All (lambda-c, lambda-s) pairs for goal's predicate, renamed onto
    goal's variables. Returns domain values, not payloads."""
    domain = get_domain(result.domain_id, w.prop_table)
    q = w.resolve_goal(module, goal)
    out = []
    for key in sorted((k for k in result.nodes if k.pred == q), key=CallKey.sort_form):
        node = result.nodes[key]
        lam_c = rename_payload_onto(domain, key.payload, goal)
        lam_s = (
            domain.bottom()
            if node.lambda_s == "bottom"
            else rename_payload_onto(domain, node.lambda_s, goal)
        )
        out.append((lam_c, lam_s))
    return out
