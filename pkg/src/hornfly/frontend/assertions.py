"""Assertion syntax desugaring.

Turns the surface forms (`pred H : Pre => Post + Comp`, argument modes,
Cartesian products, brace groups, `mode` declarations) into canonical
assertions whose heads are descriptors over distinct variables and whose
fields are plain conjunct tuples.

Expansion rules:
  +P in argument i   ->  P(Ai) in Pre and in Post
  -P in argument i   ->  var(Ai) in Pre, P(Ai) in Post
  +                  ->  nonvar(Ai) in Pre
  -                  ->  var(Ai) in Pre
  ?                  ->  nothing
  {p,q}(X)           ->  p(X), q(X)
  P1 * P2 * ...      ->  positional distribution over head arguments
"""

from __future__ import annotations

from dataclasses import dataclass

from ..terms import Atom, Num, Struct, Term, Var, functor_arity
from .ast import Assertion, EntryDecl, PropFormula, flatten_conj
from .lexer import Span


class DesugarError(Exception):
    def __init__(self, message: str, span: Span):
        super().__init__(message)
        self.message = message
        self.span = span


_ARG_NAMES = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"


def arg_var(i: int) -> Var:
    if i < len(_ARG_NAMES):
        return Var(_ARG_NAMES[i])
    return Var(f"A{i}")


@dataclass(slots=True)
class RawAssertion:
    """One `pred`/`entry`/`mode` directive body, still in surface syntax."""

    kind: str  # "pred" | "entry" | "mode"
    status: str
    body: Term
    span: Span


def split_fields(body: Term) -> tuple[Term, Term | None, Term | None, Term | None]:
    """Split `H : Pre => Post + Comp` (every field optional) into parts."""
    pre = post = comp = None
    head = body
    if isinstance(head, Struct) and head.functor == ":" and len(head.args) == 2:
        head, rest = head.args
        if isinstance(rest, Struct) and rest.functor == "=>" and len(rest.args) == 2:
            pre, rhs = rest.args
            post, comp = _split_plus(rhs)
        else:
            pre, comp = _split_plus(rest)
    elif isinstance(head, Struct) and head.functor == "=>" and len(head.args) == 2:
        head, rhs = head.args
        post, comp = _split_plus(rhs)
    elif isinstance(head, Struct) and head.functor == "+" and len(head.args) == 2:
        head, comp = head.args
    return head, pre, post, comp


def _split_plus(t: Term) -> tuple[Term, Term | None]:
    if isinstance(t, Struct) and t.functor == "+" and len(t.args) == 2:
        return t.args[0], t.args[1]
    return t, None


def _star_chain(t: Term) -> list[Term]:
    out: list[Term] = []
    while isinstance(t, Struct) and t.functor == "*" and len(t.args) == 2:
        out.append(t.args[1])
        t = t.args[0]
    out.append(t)
    out.reverse()
    return out


def _brace_parts(t: Term) -> list[Term] | None:
    if isinstance(t, Struct) and t.functor == "{}" and len(t.args) == 1:
        return flatten_conj(t.args[0])
    return None


def apply_prop(p: Term, v: Var, span: Span) -> list[Term]:
    """Attach a property expression to a subject variable: `list(num)` on A
    becomes `list(num, A)`; brace groups fan out; bare modes keep their
    head-position meaning."""
    group = _brace_parts(p)
    if group is not None:
        out: list[Term] = []
        for g in group:
            out.extend(apply_prop(g, v, span))
        return out
    if isinstance(p, Atom):
        if p.name == "+":
            return [Struct("nonvar", (v,))]
        if p.name == "-":
            return [Struct("var", (v,))]
        if p.name == "?":
            return []
        return [Struct(p.name, (v,))]
    if isinstance(p, Struct):
        return [Struct(p.functor, p.args + (v,))]
    raise DesugarError(f"bad property expression: {p!r}", span)


def _expand_product(formula: Term, head_vars: tuple[Var, ...], span: Span) -> list[Term]:
    elems = _star_chain(formula)
    if len(elems) != len(head_vars):
        raise DesugarError(
            f"product notation has {len(elems)} positions but the predicate has arity {len(head_vars)}",
            span,
        )
    out: list[Term] = []
    for elem, v in zip(elems, head_vars):
        out.extend(apply_prop(elem, v, span))
    return out


def _descriptor_from_spec(spec: Term, span: Span) -> tuple[Term, tuple[Var, ...], bool]:
    """Accepts `name/arity` or a head term; returns (descriptor, vars, was_na)."""
    if isinstance(spec, Struct) and spec.functor == "/" and len(spec.args) == 2:
        name_t, arity_t = spec.args
        if not isinstance(name_t, Atom) or not isinstance(arity_t, Num) or not isinstance(arity_t.value, int):
            raise DesugarError("expected name/arity", span)
        arity = arity_t.value
        vs = tuple(arg_var(i) for i in range(arity))
        head = Struct(name_t.name, vs) if arity else Atom(name_t.name)
        return head, vs, True
    if isinstance(spec, (Atom, Struct)):
        return spec, (), False
    raise DesugarError("expected a predicate descriptor", span)


def desugar_assertion(raw: RawAssertion) -> tuple[Term, PropFormula, PropFormula, PropFormula]:
    """Returns (descriptor head, pre, post, comp) with a distinct-variable head."""
    head_part, pre_t, post_t, comp_t = split_fields(raw.body)
    span = raw.span

    head, head_vars, was_na = _descriptor_from_spec(head_part, span)
    pre: list[Term] = []
    post: list[Term] = []

    if not was_na and isinstance(head, Struct):
        new_args: list[Term] = []
        seen: set[Var] = set()
        for i, arg in enumerate(head.args):
            v = arg_var(i) if not isinstance(arg, Var) else arg
            if isinstance(arg, Var):
                if arg in seen:
                    raise DesugarError(f"repeated variable {arg.name} in assertion head", span)
                seen.add(arg)
                new_args.append(arg)
                continue
            if isinstance(arg, Atom) and arg.name == "+":
                pre.append(Struct("nonvar", (v,)))
            elif isinstance(arg, Atom) and arg.name == "-":
                pre.append(Struct("var", (v,)))
            elif isinstance(arg, Atom) and arg.name == "?":
                pass
            elif isinstance(arg, Struct) and arg.functor == "+" and len(arg.args) == 1:
                applied = apply_prop(arg.args[0], v, span)
                pre.extend(applied)
                post.extend(applied)
            elif isinstance(arg, Struct) and arg.functor == "-" and len(arg.args) == 1:
                pre.append(Struct("var", (v,)))
                post.extend(apply_prop(arg.args[0], v, span))
            else:
                raise DesugarError(
                    f"assertion head argument {i + 1} must be a variable or a mode", span
                )
            new_args.append(v)
        head = Struct(head.functor, tuple(new_args))
        head_vars = tuple(a for a in new_args if isinstance(a, Var))  # all of them

    def formula(t: Term | None, distribute: bool) -> list[Term]:
        if t is None:
            return []
        if distribute:
            return _expand_product(t, head_vars, span)
        lits: list[Term] = []
        for conj in flatten_conj(t):
            group = _brace_parts(conj)
            if group is not None:
                lits.extend(group)
            else:
                lits.append(conj)
        return lits

    # name/arity heads take product formulas; term heads take literal ones.
    pre.extend(formula(pre_t, distribute=was_na))
    post.extend(formula(post_t, distribute=was_na))
    comp = formula(comp_t, distribute=False)

    _check_formula_vars(pre + post + comp, head, span)
    return head, tuple(pre), tuple(post), tuple(comp)


def _check_formula_vars(lits: list[Term], head: Term, span: Span) -> None:
    from ..terms import term_vars

    allowed = set(term_vars(head))
    for lit in lits:
        for v in term_vars(lit):
            if v not in allowed:
                raise DesugarError(
                    f"variable {v.name} does not occur in the assertion head", span
                )


def desugar_mode_decl(body: Term, span: Span) -> tuple[Term, PropFormula, PropFormula, PropFormula]:
    """`:- mode f(+, -).` behaves exactly like a modes-only pred assertion."""
    return desugar_assertion(RawAssertion("mode", "check", body, span))


def desugar_entry(body: Term, span: Span) -> EntryDecl:
    """Entries accept the same head sugar as pred assertions (modes,
    name/arity with products) but only a calls field; a mode's success
    part is dropped since entries describe admissible calls."""
    _head_part, _pre_t, post_t, comp_t = split_fields(body)
    if post_t is not None or comp_t is not None:
        raise DesugarError("entry declarations take only a calls field", span)
    head, pre, _post, comp = desugar_assertion(RawAssertion("entry", "check", body, span))
    if comp:
        raise DesugarError("entry declarations take only a calls field", span)
    return EntryDecl(head, pre, span)
