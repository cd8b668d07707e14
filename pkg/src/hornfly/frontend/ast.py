"""Source-level and normalized (HC IR) program representations."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace

from ..diags import Diagnostic
from ..terms import Atom, Struct, Term, Var, canonical_term, functor_arity
from .lexer import ZERO_SPAN, Span
from .pretty import format_term

STATUSES = ("check", "checked", "false", "true", "trust")
PP_STATUSES = ("check", "true", "trust")

PropFormula = tuple[Term, ...]  # conjunction of property literals; () means true


@dataclass(frozen=True, slots=True)
class Assertion:
    id: str
    status: str
    head: Term  # predicate descriptor with pairwise-distinct variables
    pre: PropFormula
    post: PropFormula
    comp: PropFormula
    span: Span
    origin: str = "user"  # user | library | builtin

    @property
    def pred(self) -> str:
        name, arity = functor_arity(self.head)
        return f"{name}/{arity}"

    def content_key(self) -> str:
        t = Struct(
            "$a",
            (
                Atom(self.status),
                self.head,
                conj_term(self.pre),
                conj_term(self.post),
                conj_term(self.comp),
            ),
        )
        return format_term(canonical_term(t))


@dataclass(frozen=True, slots=True)
class EntryDecl:
    head: Term
    pre: PropFormula
    span: Span = ZERO_SPAN

    @property
    def pred(self) -> str:
        name, arity = functor_arity(self.head)
        return f"{name}/{arity}"

    def content_key(self) -> str:
        return format_term(canonical_term(Struct("$e", (self.head, conj_term(self.pre)))))


@dataclass(frozen=True, slots=True)
class PropDecl:
    name: str
    arity: int
    is_regtype: bool
    span: Span = ZERO_SPAN

    @property
    def pred(self) -> str:
        return f"{self.name}/{self.arity}"


@dataclass(frozen=True, slots=True)
class SourceClause:
    head: Term
    body: Term | None  # unsplit conjunction; None for facts
    span: Span
    lit_spans: dict[int, Span] = field(default_factory=dict, hash=False, compare=False)

    def span_of(self, t: Term) -> Span:
        return self.lit_spans.get(id(t), self.span)


@dataclass(slots=True)
class SourceModule:
    name: str
    path: str
    exports: list[tuple[str, int]] | None  # None = export everything
    imports: list[tuple[str, list[tuple[str, int]] | None]]
    packages: list[str]
    clauses: list[SourceClause]
    assertions: list[Assertion]
    prop_decls: list[PropDecl]
    entries: list[EntryDecl]
    parse_errors: list[Diagnostic]


# -- HC IR ------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class ClauseId:
    module: str
    pred: str
    hash: str
    ordinal: int

    def __str__(self) -> str:
        return f"{self.module}:{self.pred}#{self.hash}.{self.ordinal}"


@dataclass(frozen=True, slots=True)
class CallLit:
    goal: Term
    span: Span


@dataclass(frozen=True, slots=True)
class PpLit:
    status: str
    formula: PropFormula
    span: Span


BodyLit = CallLit | PpLit


@dataclass(frozen=True, slots=True)
class Clause:
    id: ClauseId
    head: Term  # descriptor: functor applied to distinct variables
    body: tuple[BodyLit, ...]
    span: Span

    @property
    def pred(self) -> str:
        name, arity = functor_arity(self.head)
        return f"{name}/{arity}"

    def head_vars(self) -> tuple[Var, ...]:
        if isinstance(self.head, Atom):
            return ()
        assert isinstance(self.head, Struct)
        return tuple(a for a in self.head.args if isinstance(a, Var))


@dataclass(slots=True)
class HcModule:
    name: str
    path: str
    exports: list[str]  # resolved pred keys
    imports: list[tuple[str, list[str] | None]]
    preds: dict[str, tuple[Clause, ...]]
    assertions: tuple[Assertion, ...]
    entries: tuple[EntryDecl, ...]
    prop_decls: tuple[PropDecl, ...]

    def clause_by_id(self, cid: ClauseId) -> Clause | None:
        for c in self.preds.get(cid.pred, ()):
            if c.id == cid:
                return c
        return None

    def assertions_for(self, pred: str) -> list[Assertion]:
        return [a for a in self.assertions if a.pred == pred]


def conj_term(formula: PropFormula) -> Term:
    if not formula:
        return Atom("true")
    out = formula[-1]
    for lit in reversed(formula[:-1]):
        out = Struct(",", (lit, out))
    return out


def flatten_conj(t: Term) -> list[Term]:
    """Split a ','/2 tree into conjuncts; the atom `true` is the empty one."""
    out: list[Term] = []
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Struct) and u.functor == "," and len(u.args) == 2:
            stack.append(u.args[1])
            stack.append(u.args[0])
        elif isinstance(u, Atom) and u.name == "true":
            continue
        else:
            out.append(u)
    return out


def content_hash(text: str) -> str:
    return hashlib.sha1(text.encode("utf-8")).hexdigest()[:12]


def strip_clause_spans(c: Clause) -> Clause:
    body = tuple(
        CallLit(lit.goal, ZERO_SPAN) if isinstance(lit, CallLit) else PpLit(lit.status, lit.formula, ZERO_SPAN)
        for lit in c.body
    )
    return Clause(c.id, c.head, body, ZERO_SPAN)


def modules_equal(a: HcModule, b: HcModule) -> bool:
    """Structural equality modulo source spans (used by the delta laws)."""
    if a.name != b.name or set(a.preds) != set(b.preds):
        return False
    for pred in a.preds:
        ca = [strip_clause_spans(c) for c in a.preds[pred]]
        cb = [strip_clause_spans(c) for c in b.preds[pred]]
        if ca != cb:
            return False
    if [x.content_key() for x in a.assertions] != [x.content_key() for x in b.assertions]:
        return False
    if [e.content_key() for e in a.entries] != [e.content_key() for e in b.entries]:
        return False
    return True
