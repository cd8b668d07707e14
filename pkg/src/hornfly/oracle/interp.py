"""Bounded concrete interpreter over the HC IR.

Depth-first, all-solutions, occurs-check unification, deterministic
clause and literal order. Used exclusively as a test oracle and as the
executor for run-time-check instrumented modules; performance is a
non-goal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from ..engine.workspace import Workspace, split_qkey
from ..frontend.ast import CallLit, Clause, PpLit
from ..terms import (
    Atom,
    Num,
    Struct,
    Term,
    Var,
    compare_terms,
    functor_arity,
    is_ground,
    list_parts,
    mkstruct,
    term_vars,
)
from .unify import Subst, resolve, unify, walk


@dataclass(frozen=True, slots=True)
class Event:
    kind: str  # call | success | fail | rtcheck_error | pp_violation
    goal: Term
    depth: int
    detail: str = ""
    aid: int = 0  # activation id pairing call/success/fail events


@dataclass(slots=True)
class Trace:
    events: list[Event]
    depth_bound: int
    truncated: bool = False

    def solutions(self) -> list[Term]:
        return [e.goal for e in self.events if e.kind == "success" and e.depth == 0]

    def rtcheck_errors(self) -> list[Event]:
        return [e for e in self.events if e.kind == "rtcheck_error"]

    def pp_violations(self) -> list[Event]:
        return [e for e in self.events if e.kind == "pp_violation"]

    def calls_of(self, pred: str) -> list[Term]:
        return [
            e.goal
            for e in self.events
            if e.kind == "call" and _pred_of(e.goal) == pred
        ]

    def call_success_pairs(self, pred: str) -> list[tuple[Term, Term]]:
        """(call goal, success goal) per succeeded activation of pred."""
        out: list[tuple[Term, Term]] = []
        open_calls: dict[int, Term] = {}
        for e in self.events:
            if _pred_of(e.goal) != pred:
                continue
            if e.kind == "call":
                open_calls[e.aid] = e.goal
            elif e.kind == "success" and e.aid in open_calls:
                out.append((open_calls[e.aid], e.goal))
        return out


def _pred_of(goal: Term) -> str:
    name, arity = functor_arity(goal)
    return f"{name}/{arity}"


_ARITH_COMPARE = {"=:=": 0, "=\\=": 0, "<": -1, ">": 1, "=<": -1, ">=": 1}
_ORDER_COMPARE = {"@<", "@=<", "@>", "@>="}
_TYPE_TESTS = {"var", "nonvar", "ground", "num", "number", "atm", "atom", "int"}


class DepthExceeded(Exception):
    pass


@dataclass(slots=True)
class _Frame:
    snapshot: Subst | None = None


class Interpreter:
    def __init__(self, w: Workspace, depth: int = 64, record: bool = True):
        self.w = w
        self.depth_bound = depth
        self.record = record
        self.events: list[Event] = []
        self.truncated = False
        self.quiet = 0
        self._rename_counter = 0
        self._aid_counter = 0

    # -- public ----------------------------------------------------------

    def run(self, query: Term, module: str | None = None) -> Trace:
        module = module or self.w.root
        self.events = []
        self.truncated = False
        for s in self._call(query, {}, 0, module, _Frame()):
            pass
        return Trace(self.events, self.depth_bound, self.truncated)

    def provable(self, goal: Term, s: Subst, module: str) -> tuple[bool, bool]:
        """(holds, decided): evaluates a property goal without recording
        events or keeping bindings. decided=False when the bound was hit."""
        self.quiet += 1
        before = self.truncated
        self.truncated = False
        try:
            for _ in self._call(resolve(goal, s), {}, 0, module, _Frame()):
                return True, True
            decided = not self.truncated
            return False, decided
        finally:
            self.truncated = before
            self.quiet -= 1

    # -- events ----------------------------------------------------------

    def _emit(self, kind: str, goal: Term, depth: int, detail: str = "", aid: int = 0) -> None:
        if self.record and not self.quiet:
            self.events.append(Event(kind, goal, depth, detail, aid))

    # -- solving -----------------------------------------------------------

    def _call(self, goal: Term, s: Subst, depth: int, module: str, frame: _Frame) -> Iterator[Subst]:
        goal_now = resolve(goal, s)
        self._aid_counter += 1
        aid = self._aid_counter
        self._emit("call", goal_now, depth, aid=aid)
        produced = False
        for out in self._dispatch(goal, s, depth, module, frame):
            produced = True
            self._emit("success", resolve(goal, out), depth, aid=aid)
            yield out
        if not produced:
            self._emit("fail", goal_now, depth, aid=aid)

    def _dispatch(self, goal: Term, s: Subst, depth: int, module: str, frame: _Frame) -> Iterator[Subst]:
        g = walk(goal, s)
        if isinstance(g, Var):
            return iter(())
        name, arity = functor_arity(g)
        pred = f"{name}/{arity}"
        q = self.w.resolve(module, pred)
        if q is not None:
            clauses = self.w.clauses(q)
            if clauses:
                return self._solve_user(g, s, depth, q, clauses)
        return self._builtin(g, s, depth, module, frame, pred)

    def _solve_user(self, g: Term, s: Subst, depth: int, q: str, clauses) -> Iterator[Subst]:
        if depth >= self.depth_bound:
            self.truncated = True
            return
        def_module, _ = split_qkey(q)
        for clause in clauses:
            self._rename_counter += 1
            head, body = _rename_clause(clause, self._rename_counter)
            s1 = unify(g, head, s)
            if s1 is None:
                continue
            frame = _Frame()
            yield from self._solve_body(body, 0, s1, depth + 1, def_module, frame)

    def _solve_body(self, body, i: int, s: Subst, depth: int, module: str, frame: _Frame) -> Iterator[Subst]:
        if i >= len(body):
            yield s
            return
        lit = body[i]
        if isinstance(lit, PpLit):
            if lit.status == "check":
                self._check_pp(lit, s, depth, module)
            yield from self._solve_body(body, i + 1, s, depth, module, frame)
            return
        assert isinstance(lit, CallLit)
        for s1 in self._call(lit.goal, s, depth, module, frame):
            yield from self._solve_body(body, i + 1, s1, depth, module, frame)

    def _check_pp(self, lit: PpLit, s: Subst, depth: int, module: str) -> None:
        for f in lit.formula:
            holds, decided = self.provable(f, s, module)
            if decided and not holds:
                self._emit("pp_violation", resolve(f, s), depth, "program-point")
                return

    # -- builtins ----------------------------------------------------------

    def _builtin(self, g: Term, s: Subst, depth: int, module: str, frame: _Frame, pred: str) -> Iterator[Subst]:
        name, arity = functor_arity(g)
        args = g.args if isinstance(g, Struct) else ()

        if pred == "true/0":
            yield s
            return
        if pred == "fail/0":
            return
        if pred == "=/2":
            s1 = unify(args[0], args[1], s)
            if s1 is not None:
                yield s1
            return
        if pred == "is/2":
            v = _eval_arith(args[1], s)
            if v is not None:
                s1 = unify(args[0], Num(v), s)
                if s1 is not None:
                    yield s1
            return
        if name in _ARITH_COMPARE and arity == 2:
            a = _eval_arith(args[0], s)
            b = _eval_arith(args[1], s)
            if a is None or b is None:
                return
            ok = {
                "=:=": a == b,
                "=\\=": a != b,
                "<": a < b,
                ">": a > b,
                "=<": a <= b,
                ">=": a >= b,
            }[name]
            if ok:
                yield s
            return
        if pred == "==/2":
            if resolve(args[0], s) == resolve(args[1], s):
                yield s
            return
        if pred == "\\==/2":
            if resolve(args[0], s) != resolve(args[1], s):
                yield s
            return
        if name in _ORDER_COMPARE and arity == 2:
            c = compare_terms(resolve(args[0], s), resolve(args[1], s))
            ok = {"@<": c < 0, "@=<": c <= 0, "@>": c > 0, "@>=": c >= 0}[name]
            if ok:
                yield s
            return
        if name in _TYPE_TESTS and arity == 1:
            if self._type_test(name, resolve(args[0], s)):
                yield s
            return
        if pred == "indep/2":
            va = set(term_vars(resolve(args[0], s)))
            vb = set(term_vars(resolve(args[1], s)))
            if not va & vb:
                yield s
            return
        if name == "call" and arity >= 1:
            target = walk(args[0], s)
            extra = args[1:]
            if isinstance(target, Atom):
                goal2: Term = mkstruct(target.name, extra)
            elif isinstance(target, Struct):
                goal2 = Struct(target.functor, target.args + tuple(extra))
            else:
                return
            yield from self._call(goal2, s, depth, module, frame)
            return
        if pred == "rtcheck_pre/1":
            disjuncts, _ = list_parts(walk(args[0], s))
            frame.snapshot = dict(s)
            ok = not disjuncts
            for d in disjuncts:
                holds, decided = self.provable(d, s, module)
                if holds or not decided:
                    ok = True
                    break
            if not ok:
                self._emit("rtcheck_error", resolve(g, s), depth, "calls")
                return
            yield s
            return
        if pred == "rtcheck_post/2":
            pre, post = args
            call_s = frame.snapshot if frame.snapshot is not None else s
            pre_holds, pre_decided = self._provable_formula(pre, call_s, module)
            if pre_holds and pre_decided:
                post_holds, post_decided = self._provable_formula(post, s, module)
                if post_decided and not post_holds:
                    self._emit("rtcheck_error", resolve(g, s), depth, "success")
                    return
            yield s
            return
        # unknown predicate: fail silently (analysis warns separately)
        return

    def _provable_formula(self, conj: Term, s: Subst, module: str) -> tuple[bool, bool]:
        from ..frontend.ast import flatten_conj

        all_decided = True
        for f in flatten_conj(conj):
            holds, decided = self.provable(f, s, module)
            if not decided:
                all_decided = False
                continue
            if not holds:
                return False, True
        return True, all_decided

    @staticmethod
    def _type_test(name: str, t: Term) -> bool:
        if name == "var":
            return isinstance(t, Var)
        if name == "nonvar":
            return not isinstance(t, Var)
        if name == "ground":
            return is_ground(t)
        if name in ("num", "number"):
            return isinstance(t, Num)
        if name == "int":
            return isinstance(t, Num) and isinstance(t.value, int)
        return isinstance(t, Atom)  # atm / atom


def _rename_clause(clause: Clause, tag: int) -> tuple[Term, tuple]:
    mapping: dict[Var, Term] = {}

    def rn(t: Term) -> Term:
        if isinstance(t, Var):
            v = mapping.get(t)
            if v is None:
                v = Var(f"{t.name}~{tag}")
                mapping[t] = v
            return v
        if isinstance(t, Struct):
            return Struct(t.functor, tuple(rn(a) for a in t.args))
        return t

    head = rn(clause.head)
    body = []
    for lit in clause.body:
        if isinstance(lit, CallLit):
            body.append(CallLit(rn(lit.goal), lit.span))
        else:
            body.append(PpLit(lit.status, tuple(rn(f) for f in lit.formula), lit.span))
    return head, tuple(body)


def _eval_arith(t: Term, s: Subst):
    t = walk(t, s)
    if isinstance(t, Num):
        return t.value
    if isinstance(t, Struct):
        if len(t.args) == 2 and t.functor in ("+", "-", "*", "//", "mod", "/"):
            a = _eval_arith(t.args[0], s)
            b = _eval_arith(t.args[1], s)
            if a is None or b is None:
                return None
            try:
                if t.functor == "+":
                    return a + b
                if t.functor == "-":
                    return a - b
                if t.functor == "*":
                    return a * b
                if t.functor == "//":
                    return a // b
                if t.functor == "mod":
                    return a % b
                return Fraction(a) / Fraction(b)
            except (ZeroDivisionError, TypeError):
                return None
        if len(t.args) == 1 and t.functor == "-":
            a = _eval_arith(t.args[0], s)
            return None if a is None else -a
    return None
