"""Operator-precedence term reader with clause-boundary error recovery.

The operator table is fixed (no user-declared operators). Precedences
follow common Prolog conventions; assertion-level operators (`:`, `=>`)
sit between the comma and the comparison operators so that
``pred f(A) : p(A) => q(A) + comp`` groups the way the assertion
desugarer expects.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..terms import Atom, Num, Struct, Term, Var
from .lexer import ZERO_SPAN, Span, Token, tokenize

INFIX: dict[str, tuple[int, str]] = {
    ":-": (1200, "xfx"),
    ",": (1000, "xfy"),
    ":": (978, "xfx"),
    "=>": (975, "xfx"),
    "=": (700, "xfx"),
    "is": (700, "xfx"),
    "<": (700, "xfx"),
    ">": (700, "xfx"),
    "=<": (700, "xfx"),
    ">=": (700, "xfx"),
    "=:=": (700, "xfx"),
    "=\\=": (700, "xfx"),
    "==": (700, "xfx"),
    "\\==": (700, "xfx"),
    "@<": (700, "xfx"),
    "@=<": (700, "xfx"),
    "@>": (700, "xfx"),
    "@>=": (700, "xfx"),
    "+": (500, "yfx"),
    "-": (500, "yfx"),
    "*": (400, "yfx"),
    "/": (400, "yfx"),
    "//": (400, "yfx"),
    "mod": (400, "yfx"),
}

PREFIX: dict[str, tuple[int, str]] = {
    ":-": (1200, "fx"),
    "check": (1150, "fy"),
    "checked": (1150, "fy"),
    "trust": (1150, "fy"),
    "true": (1150, "fy"),
    "false": (1150, "fy"),
    "pred": (1150, "fx"),
    "entry": (1150, "fx"),
    "prop": (1150, "fx"),
    "regtype": (1150, "fx"),
    "mode": (1150, "fx"),
    "-": (200, "fy"),
    "+": (200, "fy"),
}

_CANNOT_START_TERM = {")", "]", "}", ",", "|"}


class ReadError(Exception):
    def __init__(self, message: str, span: Span):
        super().__init__(message)
        self.message = message
        self.span = span


@dataclass
class ReadResult:
    term: Term
    span: Span
    spans: dict[int, Span] = field(default_factory=dict)

    def span_of(self, t: Term) -> Span:
        return self.spans.get(id(t), self.span)


class _Reader:
    def __init__(self, toks: list[Token], clause_span: Span):
        self.toks = toks
        self.i = 0
        self.clause_span = clause_span
        self.spans: dict[int, Span] = {}

    def peek(self) -> Token | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise ReadError("unexpected end of clause", self.clause_span)
        self.i += 1
        return tok

    def note(self, t: Term, span: Span) -> Term:
        self.spans[id(t)] = span
        return t

    # -- grammar ------------------------------------------------------

    def parse(self, maxprec: int) -> tuple[Term, Span, int]:
        """Returns (term, span, precedence-of-term)."""
        left, lspan, lprec = self.parse_primary(maxprec)
        while True:
            tok = self.peek()
            if tok is None or tok.kind in ("end",):
                break
            name = tok.text if tok.kind in ("atom", "punct") else None
            if name is None or name not in INFIX:
                break
            prec, typ = INFIX[name]
            if prec > maxprec:
                break
            left_max = prec - 1 if typ[0] == "x" else prec
            if lprec > left_max:
                break
            self.next()
            right_max = prec - 1 if typ[2] == "x" else prec
            right, rspan, _ = self.parse(right_max)
            span = lspan.cover(rspan)
            left = self.note(Struct(name, (left, right)), span)
            lspan, lprec = span, prec
        return left, lspan, lprec

    def parse_primary(self, maxprec: int) -> tuple[Term, Span, int]:
        tok = self.next()
        if tok.kind == "error":
            raise ReadError(str(tok.value), tok.span)
        if tok.kind == "num":
            return self.note(Num(tok.value), tok.span), tok.span, 0
        if tok.kind == "var":
            return self.note(Var(tok.text), tok.span), tok.span, 0
        if tok.kind == "str":
            # strings become lists of character-code integers
            from ..terms import mklist

            t = mklist([Num(ord(c)) for c in tok.text])
            return self.note(t, tok.span), tok.span, 0
        if tok.kind == "punct":
            if tok.text == "(":
                t, span, _ = self.parse(1200)
                close = self.expect_punct(")")
                return t, tok.span.cover(close.span), 0
            if tok.text == "[":
                return self.parse_list(tok)
            if tok.text == "{":
                nxt = self.peek()
                if nxt is not None and nxt.kind == "punct" and nxt.text == "}":
                    self.next()
                    span = tok.span.cover(nxt.span)
                    return self.note(Atom("{}"), span), span, 0
                inner, _, _ = self.parse(1200)
                close = self.expect_punct("}")
                span = tok.span.cover(close.span)
                return self.note(Struct("{}", (inner,)), span), span, 0
            if tok.text == "!":
                return self.note(Atom("!"), tok.span), tok.span, 0
            raise ReadError(f"unexpected {tok.text!r}", tok.span)
        assert tok.kind == "atom"
        if tok.functor:
            self.expect_punct("(")
            args = [self.parse_arg()]
            while True:
                nxt = self.peek()
                if nxt is not None and nxt.kind == "punct" and nxt.text == ",":
                    self.next()
                    args.append(self.parse_arg())
                else:
                    break
            close = self.expect_punct(")")
            span = tok.span.cover(close.span)
            return self.note(Struct(tok.text, tuple(args)), span), span, 0
        if tok.text in PREFIX:
            prec, typ = PREFIX[tok.text]
            if prec <= maxprec and self.can_start_term():
                argmax = prec - 1 if typ[1] == "x" else prec
                arg, aspan, _ = self.parse(argmax)
                span = tok.span.cover(aspan)
                if tok.text == "-" and isinstance(arg, Num):
                    return self.note(Num(-arg.value), span), span, 0
                return self.note(Struct(tok.text, (arg,)), span), span, prec
        return self.note(Atom(tok.text), tok.span), tok.span, 0

    def parse_arg(self) -> Term:
        t, _, _ = self.parse(999)
        return t

    def parse_list(self, open_tok: Token) -> tuple[Term, Span, int]:
        nxt = self.peek()
        if nxt is not None and nxt.kind == "punct" and nxt.text == "]":
            self.next()
            span = open_tok.span.cover(nxt.span)
            return self.note(Atom("[]"), span), span, 0
        items = [self.parse_arg()]
        tail: Term = Atom("[]")
        while True:
            tok = self.next()
            if tok.kind != "punct":
                raise ReadError("expected ',' '|' or ']' in list", tok.span)
            if tok.text == ",":
                items.append(self.parse_arg())
            elif tok.text == "|":
                tail = self.parse_arg()
                tok = self.expect_punct("]")
                break
            elif tok.text == "]":
                break
            else:
                raise ReadError("expected ',' '|' or ']' in list", tok.span)
        span = open_tok.span.cover(tok.span)
        out = tail
        for item in reversed(items):
            out = Struct(".", (item, out))
            self.spans.setdefault(id(out), span)
        return out, span, 0

    def can_start_term(self) -> bool:
        tok = self.peek()
        if tok is None or tok.kind == "end":
            return False
        if tok.kind == "punct" and tok.text in _CANNOT_START_TERM:
            return False
        if tok.kind == "atom" and tok.text in INFIX and not tok.functor:
            # `- =` etc: the next op atom is infix-only here, so the
            # prefix atom is really an operand (e.g. `sort(+, -)`).
            if tok.text not in PREFIX:
                return False
        return True

    def expect_punct(self, text: str) -> Token:
        tok = self.next()
        if tok.kind != "punct" or tok.text != text:
            raise ReadError(f"expected {text!r}, got {tok.text!r}", tok.span)
        return tok


def split_clauses(toks: list[Token]) -> list[tuple[list[Token], Span]]:
    """Chunk a token stream at end tokens. Each chunk excludes the final '.'."""
    chunks: list[tuple[list[Token], Span]] = []
    cur: list[Token] = []
    for tok in toks:
        if tok.kind == "end":
            if cur:
                span = cur[0].span.cover(tok.span)
                chunks.append((cur, span))
                cur = []
            continue
        cur.append(tok)
    if cur:
        span = cur[0].span.cover(cur[-1].span)
        chunks.append((cur, span))
    return chunks


def read_term(text: str) -> ReadResult:
    """Parse a single term from text (no trailing '.' required). Test helper
    and property-formula entry point."""
    toks = [t for t in tokenize(text) if t.kind != "end"]
    if not toks:
        raise ReadError("empty term", ZERO_SPAN)
    rd = _Reader(toks, toks[0].span.cover(toks[-1].span))
    term, span, _ = rd.parse(1200)
    if rd.peek() is not None:
        tok = rd.peek()
        raise ReadError(f"trailing tokens after term: {tok.text!r}", tok.span)
    return ReadResult(term, span, rd.spans)


def read_clause_chunk(toks: list[Token], span: Span) -> ReadResult:
    rd = _Reader(toks, span)
    term, tspan, _ = rd.parse(1200)
    if rd.peek() is not None:
        tok = rd.peek()
        raise ReadError(f"trailing tokens after clause: {tok.text!r}", tok.span)
    return ReadResult(term, span if span else tspan, rd.spans)
