"""The bounded interpreter: unification, enumeration, trace structure."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hornfly.frontend import read_term
from hornfly.oracle import Interpreter, sample_terms, unify
from hornfly.oracle.unify import resolve, walk
from hornfly.terms import Atom, Num, Struct, Term, Var, rename_term, term_vars

from conftest import build_workspace


def rt(text):
    return read_term(text).term


# -- unification ----------------------------------------------------------


def naive_unify(a: Term, b: Term, s):
    """Textbook reference: substitution application + recursion."""
    a = resolve(a, s)
    b = resolve(b, s)
    if a == b:
        return s
    if isinstance(a, Var):
        if a in set(term_vars(b)):
            return None
        return {**s, a: b}
    if isinstance(b, Var):
        return naive_unify(b, a, s)
    if isinstance(a, Struct) and isinstance(b, Struct):
        if a.functor != b.functor or len(a.args) != len(b.args):
            return None
        for x, y in zip(a.args, b.args):
            s = naive_unify(x, y, s)
            if s is None:
                return None
        return s
    return None


class TestUnify:
    def test_basic(self):
        s = unify(rt("f(X, a)"), rt("f(b, Y)"), {})
        assert resolve(rt("f(X, Y)"), s) == rt("f(b, a)")

    def test_occurs_check(self):
        assert unify(Var("X"), rt("f(X)"), {}) is None

    def test_mismatch(self):
        assert unify(rt("f(a)"), rt("g(a)"), {}) is None
        assert unify(rt("f(a)"), rt("f(a, b)"), {}) is None

    def test_agrees_with_reference_on_random_pairs(self):
        rng = random.Random(3)
        pool = sample_terms(rng, 60, depth=2)
        names = ["X", "Y", "Z"]

        def vary(t, p):
            # sprinkle variables into a ground term
            if rng.random() < p:
                return Var(rng.choice(names))
            if isinstance(t, Struct):
                return Struct(t.functor, tuple(vary(a, p) for a in t.args))
            return t

        agree = 0
        for _ in range(400):
            a = vary(pool[rng.randrange(len(pool))], 0.4)
            b = vary(pool[rng.randrange(len(pool))], 0.4)
            s1 = unify(a, b, {})
            s2 = naive_unify(a, b, {})
            assert (s1 is None) == (s2 is None), (a, b)
            if s1 is not None:
                # both are mgus: each makes the terms equal, idempotently
                assert resolve(a, s1) == resolve(b, s1)
                assert resolve(a, s2) == resolve(b, s2)
                assert resolve(resolve(a, s1), s1) == resolve(a, s1)
                agree += 1
        assert agree > 50


# -- bounded runs ------------------------------------------------------------


@pytest.fixture(scope="module")
def nrev():
    return build_workspace("nrev.pl")


class TestRunBounded:
    def test_nrev_solution(self, nrev):
        tr = Interpreter(nrev, 32).run(rt("nrev([a,b], X)"))
        assert [str(s) for s in tr.solutions()] == [str(rt("nrev([a,b], [b,a])"))]
        assert not tr.truncated

    def test_no_clauses_single_fail(self, nrev):
        tr = Interpreter(nrev, 8).run(rt("nothere(1)"))
        assert tr.solutions() == []
        kinds = [e.kind for e in tr.events]
        assert kinds == ["call", "fail"]

    def test_depth_bound_truncates(self):
        w = build_workspace("loop.pl")
        tr = Interpreter(w, 5).run(rt("spin(X)"))
        assert tr.solutions() == []
        assert tr.truncated

    def test_events_nest_properly(self, nrev):
        tr = Interpreter(nrev, 32).run(rt("nrev([a,b,c], X)"))
        open_aids = []
        closed = set()
        for e in tr.events:
            if e.kind == "call":
                open_aids.append(e.aid)
            elif e.kind in ("success", "fail"):
                assert e.aid in open_aids or e.aid in closed
                if e.kind == "fail":
                    closed.add(e.aid)
        assert len(open_aids) == len(set(open_aids))

    def test_builtins(self, nrev):
        tr = Interpreter(nrev, 16).run(rt("X is 2 + 3 * 4"))
        assert str(tr.solutions()[0]) == str(rt("14 is 2 + 3 * 4"))
        assert Interpreter(nrev, 16).run(rt("1 < 2")).solutions()
        assert not Interpreter(nrev, 16).run(rt("2 < 1")).solutions()
        assert Interpreter(nrev, 16).run(rt("a @< b")).solutions()
        assert Interpreter(nrev, 16).run(rt("f(X) == f(X)")).solutions()
        assert not Interpreter(nrev, 16).run(rt("f(X) == f(Y)")).solutions()

    def test_call_metapredicate(self, nrev):
        tr = Interpreter(nrev, 32).run(rt("call(list, [a])"), "someprops")
        assert tr.solutions()
        tr2 = Interpreter(nrev, 32).run(rt("list(color, [red, blue])"), "someprops")
        assert tr2.solutions()
        tr3 = Interpreter(nrev, 32).run(rt("list(color, [red, 7])"), "someprops")
        assert not tr3.solutions()

    def test_generation_truncates_not_hangs(self, nrev):
        tr = Interpreter(nrev, 6).run(rt("nrev(L, [a])"))
        assert tr.truncated or tr.solutions()

    def test_pp_violation_event(self):
        w = build_workspace("colorbug.pl")
        tr = Interpreter(w, 32).run(rt("main(A, B)"))
        assert tr.solutions()  # the program itself succeeds
        assert tr.pp_violations(), "check((list(color,A), var(B))) must flag var(B)"

    def test_call_success_pairs(self, nrev):
        tr = Interpreter(nrev, 32).run(rt("nrev([a], X)"))
        pairs = tr.call_success_pairs("nrev/2")
        assert (
            str(pairs[-1][0]),
            str(pairs[-1][1]),
        ) == (str(rt("nrev([a], X)")).replace("X", pairs[-1][0].args[1].name), str(rt("nrev([a], [a])")))
