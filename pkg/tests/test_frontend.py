"""Parser, desugarer, and normalizer behavior."""

import pytest

from hornfly.frontend import (
    CallLit,
    PpLit,
    normalize,
    parse_module,
    pretty_module,
    read_term,
)
from hornfly.frontend.reader import ReadError
from hornfly.terms import Atom, Num, Struct, Var, mklist


def rt(text):
    return read_term(text).term


class TestReader:
    def test_plain_structure(self):
        assert rt("f(a, B)") == Struct("f", (Atom("a"), Var("B")))

    def test_operators_nest_by_precedence(self):
        t = rt("X is Y + 1 * 2")
        assert t == Struct(
            "is",
            (Var("X"), Struct("+", (Var("Y"), Struct("*", (Num(1), Num(2)))))),
        )

    def test_lists(self):
        assert rt("[a,b|T]") == Struct(".", (Atom("a"), Struct(".", (Atom("b"), Var("T")))))
        assert rt("[]") == Atom("[]")
        assert rt("[X]") == mklist([Var("X")])

    def test_negative_numbers_fold(self):
        assert rt("-3") == Num(-3)
        assert rt("f(-3)") == Struct("f", (Num(-3),))
        assert rt("1 - -3") == Struct("-", (Num(1), Num(-3)))

    def test_operator_atoms_in_arg_position(self):
        assert rt("sort(+, -)") == Struct("sort", (Atom("+"), Atom("-")))
        assert rt("p(?)") == Struct("p", (Atom("?"),))

    def test_prefix_mode_application(self):
        t = rt("sort(+list(num), -list(num))")
        plus, minus = t.args
        assert plus == Struct("+", (Struct("list", (Atom("num"),)),))
        assert minus == Struct("-", (Struct("list", (Atom("num"),)),))

    def test_assertion_shape(self):
        t = rt("pred nrev(A, B) : list(A) => list(B)")
        assert t.functor == "pred"
        inner = t.args[0]
        assert inner.functor == ":"
        assert inner.args[1].functor == "=>"

    def test_product_and_comp_shape(self):
        t = rt("pred sort/2 : list(num) * var => list(num) * list(num) + is_det")
        inner = t.args[0]
        assert inner.functor == ":"
        arrow = inner.args[1]
        assert arrow.functor == "=>"
        assert arrow.args[1].functor == "+"  # post + comp split

    def test_braces(self):
        t = rt("{list, ground} * var")
        assert t.functor == "*"
        assert t.args[0].functor == "{}"

    def test_curly_empty(self):
        assert rt("{}") == Atom("{}")

    def test_quoted_atoms(self):
        assert rt("'hello world'") == Atom("hello world")
        assert rt("'is'(X, 1)") == Struct("is", (Var("X"), Num(1)))

    def test_trailing_garbage_raises(self):
        with pytest.raises(ReadError):
            read_term("f(a) b")

    def test_infix_functor_call_form(self):
        assert rt("is(X, Y)") == Struct("is", (Var("X"), Var("Y")))

    def test_standard_order_ops(self):
        t = rt("X @< Y")
        assert t.functor == "@<"


NREV = """\
:- module(nrev, [nrev/2], [assertions]).
:- entry nrev/2 : {list, ground} * var.

:- pred nrev(A, B) : list(A) => list(B).
nrev([], []).
nrev([H|L], R) :- nrev(L, T), conc(T, [H], R).
"""


class TestParseModule:
    def test_fig2_style_module(self):
        m = parse_module(NREV, "nrev.pl")
        assert m.name == "nrev"
        assert m.exports == [("nrev", 2)]
        assert len(m.clauses) == 2
        assert len(m.assertions) == 1
        assert m.parse_errors == []
        a = m.assertions[0]
        assert a.status == "check"
        assert a.pre == (Struct("list", (Var("A"),)),)
        assert a.post == (Struct("list", (Var("B"),)),)

    def test_entry_brace_product(self):
        m = parse_module(NREV, "nrev.pl")
        (e,) = m.entries
        a, b = Var("A"), Var("B")
        assert e.head == Struct("nrev", (a, b))
        assert e.pre == (
            Struct("list", (a,)),
            Struct("ground", (a,)),
            Struct("var", (b,)),
        )

    def test_empty_input(self):
        m = parse_module("", "empty.pl")
        assert m.clauses == [] and m.assertions == [] and m.parse_errors == []

    def test_malformed_clause_recovers(self):
        m = parse_module("p(X :- q.\nr(a).\n", "bad.pl")
        assert len(m.parse_errors) == 1
        assert len(m.clauses) == 1
        assert m.clauses[0].head == Struct("r", (Atom("a"),))

    def test_error_recovery_keeps_later_items(self):
        text = ":- module(m, _, [assertions]).\np(1).\n)))garbage(((.\nq(2).\n"
        m = parse_module(text, "m.pl")
        assert len(m.clauses) == 2
        assert len(m.parse_errors) == 1

    def test_unknown_package_warns(self):
        m = parse_module(":- module(m, _, [assertions, functional]).\n", "m.pl")
        warnings = [d for d in m.parse_errors if d.severity == "warning"]
        assert any("functional" in d.message for d in warnings)

    def test_assertions_require_package(self):
        m = parse_module(":- module(m, _, []).\n:- pred p(A) : list(A).\np(_).\n", "m.pl")
        assert m.assertions == []
        assert any(d.code == "package" for d in m.parse_errors)

    def test_bad_pp_status_is_parse_error(self):
        m = parse_module(
            ":- module(m, _, [assertions]).\np(X) :- false(list(X)), q(X).\nq(_).\n", "m.pl"
        )
        assert any("program-point" in d.message for d in m.parse_errors)

    def test_status_prefixes(self):
        text = (
            ":- module(m, _, [assertions]).\n"
            ":- trust pred p(A) => list(A).\n"
            ":- checked pred q(A) : list(A).\n"
            "p(_). q(_).\n"
        )
        m = parse_module(text, "m.pl")
        assert [a.status for a in m.assertions] == ["trust", "checked"]

    def test_prop_and_regtype_decls(self):
        text = (
            ":- module(m, _, [assertions]).\n"
            ":- prop sorted/1.\n"
            ":- regtype color/1.\n"
            ":- prop list/1 + regtype.\n"
            "sorted([]). color(red). list([]).\n"
        )
        m = parse_module(text, "m.pl")
        flags = {pd.pred: pd.is_regtype for pd in m.prop_decls}
        assert flags == {"sorted/1": False, "color/1": True, "list/1": True}

    def test_undefined_prop_warns(self):
        m = parse_module(":- module(m, _, [assertions]).\n:- prop nowhere/1.\n", "m.pl")
        assert any(d.code == "prop" for d in m.parse_errors)


class TestDesugar:
    def desugar(self, text):
        body = ":- module(m, _, [assertions]).\n" + text + "\np(_, _). sort(_, _).\n"
        m = parse_module(body, "m.pl")
        assert not [d for d in m.parse_errors if d.severity == "error"], m.parse_errors
        return m.assertions[0]

    def test_iso_modes(self):
        a = self.desugar(":- pred sort(+list(num), -list(num)).")
        A, B = Var("A"), Var("B")
        assert a.head == Struct("sort", (A, B))
        assert a.pre == (Struct("list", (Atom("num"), A)), Struct("var", (B,)))
        assert a.post == (
            Struct("list", (Atom("num"), A)),
            Struct("list", (Atom("num"), B)),
        )

    def test_bare_modes(self):
        a = self.desugar(":- pred sort(+, -).")
        A, B = Var("A"), Var("B")
        assert a.pre == (Struct("nonvar", (A,)), Struct("var", (B,)))
        assert a.post == ()

    def test_question_mark_adds_nothing(self):
        a = self.desugar(":- pred p(?, ?).")
        assert a.pre == () and a.post == ()

    def test_product_form(self):
        a = self.desugar(":- pred sort/2 : list(num) * var => list(num) * list(num).")
        A, B = Var("A"), Var("B")
        assert a.pre == (Struct("list", (Atom("num"), A)), Struct("var", (B,)))
        assert a.post == (
            Struct("list", (Atom("num"), A)),
            Struct("list", (Atom("num"), B)),
        )

    def test_comp_field(self):
        a = self.desugar(":- pred p/2 : var * var + (not_fails, is_det).")
        assert a.comp == (Atom("not_fails"), Atom("is_det"))

    def test_mode_decl_like_pred(self):
        body = ":- module(m, _, [assertions]).\n:- mode sort(+, -).\nsort(_, _).\n"
        m = parse_module(body, "m.pl")
        (a,) = m.assertions
        assert a.pre == (Struct("nonvar", (Var("A"),)), Struct("var", (Var("B"),)))

    def test_product_arity_mismatch_is_error(self):
        body = ":- module(m, _, [assertions]).\n:- pred sort/2 : list * var * var.\nsort(_, _).\n"
        m = parse_module(body, "m.pl")
        assert m.assertions == []
        assert any("arity" in d.message for d in m.parse_errors)

    def test_desugaring_idempotent(self):
        from hornfly.frontend import format_assertion

        a = self.desugar(":- pred sort(+list(num), -list(num)).")
        m2 = parse_module(
            ":- module(m, _, [assertions]).\n" + format_assertion(a) + "\nsort(_, _).\n",
            "m.pl",
        )
        b = m2.assertions[0]
        assert (a.head, a.pre, a.post, a.comp, a.status) == (
            b.head,
            b.pre,
            b.post,
            b.comp,
            b.status,
        )


class TestNormalize:
    def norm(self, text):
        return normalize(parse_module(text, "m.pl"))

    def test_head_flattening(self):
        hc = self.norm(":- module(m, _, []).\np(f(X)) :- q(X).\nq(_).\n")
        (c,) = hc.preds["p/1"]
        assert c.head == Struct("p", (Var("_A0"),))
        assert c.body[0] == CallLit(
            Struct("=", (Var("_A0"), Struct("f", (Var("X"),)))), c.body[0].span
        )
        assert c.body[1].goal == Struct("q", (Var("X"),))

    def test_fact_flattening(self):
        hc = self.norm(":- module(m, _, []).\nnrev([], []).\n")
        (c,) = hc.preds["nrev/2"]
        assert c.head == Struct("nrev", (Var("_A0"), Var("_A1")))
        goals = [lit.goal for lit in c.body]
        assert goals == [
            Struct("=", (Var("_A0"), Atom("[]"))),
            Struct("=", (Var("_A1"), Atom("[]"))),
        ]

    def test_repeated_head_var_split(self):
        hc = self.norm(":- module(m, _, []).\neq(X, X).\n")
        (c,) = hc.preds["eq/2"]
        assert c.head == Struct("eq", (Var("X"), Var("_A1")))
        assert c.body[0].goal == Struct("=", (Var("_A1"), Var("X")))

    def test_pp_assertion_literal(self):
        hc = self.norm(
            ":- module(m, _, [assertions]).\np(B) :- check(var(B)), q(B).\nq(_).\n"
        )
        (c,) = hc.preds["p/1"]
        pp = c.body[0]
        assert isinstance(pp, PpLit)
        assert pp.status == "check"
        assert pp.formula == (Struct("var", (Var("B"),)),)

    def test_clause_ids_stable_under_whitespace(self):
        a = self.norm(":- module(m, _, []).\np(X) :- q(X).\nq(_).\n")
        b = self.norm(":- module(m, _, []).\np( X ) :-\n    q( X ).\nq(_).\n")
        assert [c.id for c in a.preds["p/1"]] == [c.id for c in b.preds["p/1"]]

    def test_twin_clauses_get_ordinals(self):
        hc = self.norm(":- module(m, _, []).\np(a).\np(a).\n")
        ids = [c.id for c in hc.preds["p/1"]]
        assert ids[0].hash == ids[1].hash
        assert (ids[0].ordinal, ids[1].ordinal) == (0, 1)


class TestRoundTrip:
    def test_pretty_reparses_structurally_equal(self):
        m1 = parse_module(NREV, "nrev.pl")
        text = pretty_module(m1)
        m2 = parse_module(text, "nrev.pl")
        assert m2.parse_errors == []
        assert m1.name == m2.name and m1.exports == m2.exports
        assert [(c.head, c.body) for c in m1.clauses] == [(c.head, c.body) for c in m2.clauses]
        assert [a.content_key() for a in m1.assertions] == [
            a.content_key() for a in m2.assertions
        ]
        assert [e.content_key() for e in m1.entries] == [e.content_key() for e in m2.entries]
