"""Tokenizer for the clause language.

Produces a flat token stream with byte-accurate spans. The reader never
touches raw text, so all span bookkeeping lives here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True, slots=True)
class Pos:
    offset: int  # byte offset into the UTF-8 encoding
    line: int  # 1-based
    col: int  # 1-based


@dataclass(frozen=True, slots=True)
class Span:
    start: Pos
    end: Pos

    def cover(self, other: "Span") -> "Span":
        a = self.start if self.start.offset <= other.start.offset else other.start
        b = self.end if self.end.offset >= other.end.offset else other.end
        return Span(a, b)


ZERO_POS = Pos(0, 1, 1)
ZERO_SPAN = Span(ZERO_POS, ZERO_POS)

# kind in {"atom", "var", "num", "str", "punct", "end", "error"}
@dataclass(frozen=True, slots=True)
class Token:
    kind: str
    text: str
    value: object
    span: Span
    # True when the token is directly followed by "(" with no whitespace,
    # which makes an atom a functor application even if it names an operator.
    functor: bool = False


SYMBOL_CHARS = set("+-*/\\^<>=~:.?@#&$")
SOLO = {"(": "(", ")": ")", "[": "[", "]": "]", "{": "{", "}": "}", ",": ",", "|": "|", "!": "!", ";": ";"}


class LexError(Exception):
    def __init__(self, message: str, span: Span):
        super().__init__(message)
        self.message = message
        self.span = span


def tokenize(text: str) -> list[Token]:
    """Lex the whole input. Unterminated quotes/blocks yield 'error' tokens
    rather than raising, so the reader can attach a diagnostic and resync."""
    toks: list[Token] = []
    i = 0
    n = len(text)
    offset = 0
    line = 1
    col = 1

    def pos() -> Pos:
        return Pos(offset, line, col)

    def advance(k: int) -> None:
        nonlocal i, offset, line, col
        for _ in range(k):
            ch = text[i]
            offset += len(ch.encode("utf-8"))
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            advance(1)
            continue
        if ch == "%":
            j = i
            while j < n and text[j] != "\n":
                j += 1
            advance(j - i)
            continue
        if ch == "/" and i + 1 < n and text[i + 1] == "*":
            start = pos()
            j = text.find("*/", i + 2)
            if j < 0:
                advance(n - i)
                toks.append(Token("error", text[i:], "unterminated block comment", Span(start, pos())))
                break
            advance(j + 2 - i)
            continue

        start = pos()

        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            is_frac = False
            if j < n and text[j] == "." and j + 1 < n and text[j + 1].isdigit():
                is_frac = True
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            word = text[i:j]
            advance(j - i)
            if is_frac:
                value: object = Fraction(word)
            else:
                value = int(word)
            toks.append(Token("num", word, value, Span(start, pos())))
            continue

        if ch == "_" or ch.isalpha():
            j = i
            while j < n and (text[j] == "_" or text[j].isalnum()):
                j += 1
            word = text[i:j]
            advance(j - i)
            span = Span(start, pos())
            fcall = i < n and text[i] == "("
            if word[0] == "_" or word[0].isupper():
                toks.append(Token("var", word, word, span, fcall))
            else:
                toks.append(Token("atom", word, word, span, fcall))
            continue

        if ch == "'":
            j = i + 1
            buf = []
            ok = False
            while j < n:
                if text[j] == "\\" and j + 1 < n:
                    esc = text[j + 1]
                    buf.append({"n": "\n", "t": "\t", "\\": "\\", "'": "'"}.get(esc, esc))
                    j += 2
                    continue
                if text[j] == "'":
                    if j + 1 < n and text[j + 1] == "'":
                        buf.append("'")
                        j += 2
                        continue
                    ok = True
                    break
                buf.append(text[j])
                j += 1
            if not ok:
                advance(n - i)
                toks.append(Token("error", text[i:], "unterminated quoted atom", Span(start, pos())))
                break
            advance(j + 1 - i)
            fcall = i < n and text[i] == "("
            toks.append(Token("atom", "".join(buf), "".join(buf), Span(start, pos()), fcall))
            continue

        if ch == '"':
            j = i + 1
            while j < n and text[j] != '"':
                j += 2 if text[j] == "\\" else 1
            if j >= n:
                advance(n - i)
                toks.append(Token("error", text[i:], "unterminated string", Span(start, pos())))
                break
            word = text[i + 1 : j]
            advance(j + 1 - i)
            toks.append(Token("str", word, word, Span(start, pos())))
            continue

        if ch in SOLO:
            advance(1)
            fcall = i < n and text[i] == "(" and ch not in "([{"
            toks.append(Token("punct", ch, ch, Span(start, pos()), fcall))
            continue

        if ch in SYMBOL_CHARS:
            j = i
            while j < n and text[j] in SYMBOL_CHARS:
                j += 1
            word = text[i:j]
            # A '.' followed by layout (or EOF) terminates a clause; a '.'
            # glued to more symbol chars is part of one symbolic atom.
            if word[0] == "." and (len(word) == 1 or word == "."):
                nxt = text[j] if j < n else ""
                if nxt == "" or nxt in " \t\r\n%":
                    advance(1)
                    toks.append(Token("end", ".", ".", Span(start, pos())))
                    continue
            if word == "." and j < n and text[j] == "(":
                advance(1)
                toks.append(Token("atom", ".", ".", Span(start, pos()), True))
                continue
            advance(j - i)
            fcall = i < n and text[i] == "("
            toks.append(Token("atom", word, word, Span(start, pos()), fcall))
            continue

        advance(1)
        toks.append(Token("error", ch, f"unexpected character {ch!r}", Span(start, pos())))

    return toks
