"""Front end: tokenize, parse, desugar assertions, normalize to HC IR, diff."""

from .ast import (
    Assertion,
    BodyLit,
    CallLit,
    Clause,
    ClauseId,
    EntryDecl,
    HcModule,
    PpLit,
    PropDecl,
    PropFormula,
    SourceClause,
    SourceModule,
    flatten_conj,
    modules_equal,
)
from .delta import (
    AddAssertion,
    AddClause,
    AddEntry,
    DelAssertion,
    DelClause,
    DelEntry,
    Delta,
    apply_delta,
    diff_modules,
)
from .lexer import Pos, Span, tokenize
from .module import parse_module
from .normalize import normalize
from .pretty import format_assertion, format_term, pretty_module
from .reader import ReadError, read_term

__all__ = [
    "Assertion",
    "BodyLit",
    "CallLit",
    "Clause",
    "ClauseId",
    "EntryDecl",
    "HcModule",
    "PpLit",
    "PropDecl",
    "PropFormula",
    "SourceClause",
    "SourceModule",
    "flatten_conj",
    "modules_equal",
    "AddAssertion",
    "AddClause",
    "AddEntry",
    "DelAssertion",
    "DelClause",
    "DelEntry",
    "Delta",
    "apply_delta",
    "diff_modules",
    "Pos",
    "Span",
    "tokenize",
    "parse_module",
    "normalize",
    "format_assertion",
    "format_term",
    "pretty_module",
    "ReadError",
    "read_term",
]
