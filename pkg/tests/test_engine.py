"""Fixpoint engine: spec'd examples, determinism, soundness vs the oracle."""

import pytest

from hornfly.adomains import get_domain
from hornfly.checker.evidence import entry_queries
from hornfly.engine import Workspace, analyze, lookup_renamed
from hornfly.engine.workspace import BUILTIN_MODULE, split_qkey
from hornfly.frontend import normalize, parse_module, read_term
from hornfly.oracle import Interpreter
from hornfly.terms import Var, functor_arity

from conftest import build_workspace, corpus_roots
from helpers import (
    abstract_subst_modes,
    abstract_subst_pairsh,
    modes_value_admits,
    pairsh_value_admits,
    regtypes_value_admits,
)

DOMAINS = ("modes", "pairsh", "regtypes")


def rt(text):
    return read_term(text).term


class TestAnalyzeExamples:
    def test_empty_program_no_entries(self):
        m = normalize(parse_module(":- module(empty, [], []).\n", "empty.pl"))
        w = Workspace({"empty": m}, root="empty")
        for d in DOMAINS:
            assert analyze(w, d).nodes == {}

    def test_nrev_entry_pattern(self):
        w = build_workspace("nrev.pl")
        r = analyze(w, "regtypes")
        pairs = lookup_renamed(r, w, "nrev", rt("nrev(A, B)"))
        assert len(pairs) == 1
        lam_c, lam_s = pairs[0]
        d = get_domain("regtypes", w.prop_table)
        assert d.render(lam_c) == "{A:list, B:var}"
        assert d.render(lam_s) == "{A:list, B:list}"

    def test_self_loop_bottom_success(self):
        w = build_workspace("loop.pl")
        for d in DOMAINS:
            r = analyze(w, d)
            dom = get_domain(d, w.prop_table)
            pairs = lookup_renamed(r, w, "loop", rt("spin(X)"))
            assert len(pairs) == 1
            assert dom.is_bottom(pairs[0][1])

    def test_lookup_unreached_predicate(self):
        w = build_workspace("nrev.pl")
        r = analyze(w, "modes")
        assert lookup_renamed(r, w, "nrev", rt("missing(A)")) == []

    def test_lookup_renaming_roundtrip(self):
        w = build_workspace("nrev.pl")
        r = analyze(w, "modes")
        d = get_domain("modes", w.prop_table)
        via_ab = lookup_renamed(r, w, "nrev", rt("nrev(A, B)"))
        via_uv = lookup_renamed(r, w, "nrev", rt("nrev(U, V)"))
        assert d.render(via_ab[0][0]).replace("A", "U").replace("B", "V") == d.render(
            via_uv[0][0]
        )

    def test_unresolved_pred_warns_and_tops(self):
        text = ":- module(m, [p/1], [assertions]).\n:- entry p/1 : var.\np(X) :- mystery(X).\n"
        m = normalize(parse_module(text, "m.pl"))
        w = Workspace({"m": m}, root="m")
        r = analyze(w, "modes")
        assert any(d.code == "unresolved" for d in r.warnings)
        pairs = lookup_renamed(r, w, "m", rt("p(X)"))
        assert pairs and not get_domain("modes").is_bottom(pairs[0][1])

    def test_default_entries_from_exports(self):
        text = ":- module(m, [p/1], [assertions]).\np(a).\nq(b).\n"
        m = normalize(parse_module(text, "m.pl"))
        w = Workspace({"m": m}, root="m")
        r = analyze(w, "modes")
        preds = {k.pred for k in r.nodes}
        assert "m:p/1" in preds and "m:q/1" not in preds

    def test_determinism(self):
        for name in ("nrev.pl", "sortcheck.pl", "treewalk.pl"):
            w1 = build_workspace(name)
            w2 = build_workspace(name)
            for d in DOMAINS:
                r1, r2 = analyze(w1, d), analyze(w2, d)
                assert r1.graph_equal(r2), (name, d)
                assert r1.stats.to_json() == r2.stats.to_json()

    def test_trust_refines_external_pred(self):
        text = (
            ":- module(m, [go/1], [assertions]).\n"
            ":- entry go/1 : var.\n"
            ":- trust pred ext(X) => num(X).\n"
            "go(X) :- ext(X).\n"
        )
        m = normalize(parse_module(text, "m.pl"))
        w = Workspace({"m": m}, root="m")
        r = analyze(w, "regtypes")
        d = get_domain("regtypes", w.prop_table)
        (pair,) = lookup_renamed(r, w, "m", rt("go(X)"))
        assert d.render(pair[1]) == "{X:num}"
        assert not any(x.code == "unresolved" for x in r.warnings)

    def test_context_sensitivity_multiple_nodes(self):
        text = (
            ":- module(m, [a/1, b/1], [assertions]).\n"
            ":- entry a/1 : var.\n"
            ":- entry b/1 : num.\n"
            "a(X) :- shared(X).\n"
            "b(X) :- shared(X).\n"
            "shared(X) :- id(X).\n"
            "id(X) :- X = X.\n"
        )
        m = normalize(parse_module(text, "m.pl"))
        w = Workspace({"m": m}, root="m")
        r = analyze(w, "regtypes")
        shared_nodes = [k for k in r.nodes if k.pred == "m:shared/1"]
        assert len(shared_nodes) == 2  # one per calling situation


class TestEngineSoundness:
    """Every concrete (call, success) observed from admissible entries is
    below some analysis node, for all corpus programs and domains."""

    @pytest.mark.parametrize("root", corpus_roots())
    def test_oracle_agreement(self, root):
        w = build_workspace(root)
        traces = []
        for module, q in entry_queries(w, per_entry=3):
            traces.append((module, Interpreter(w, 6).run(q, module)))
        for domain_id in DOMAINS:
            self._check_domain(root, w, domain_id, traces)

    def _check_domain(self, root, w, domain_id, traces):
        result = analyze(w, domain_id)
        domain = get_domain(domain_id, w.prop_table)

        for module, tr in traces:
            called_preds = set()
            for e in tr.events:
                if e.kind != "call":
                    continue
                name, arity = functor_arity(e.goal)
                called_preds.add(f"{name}/{arity}")
            for pred in sorted(called_preds):
                q = w.resolve(module, pred)
                qmod, _ = split_qkey(q)
                if qmod == BUILTIN_MODULE or not w.clauses(q):
                    continue
                nodes = [(k, result.nodes[k]) for k in result.nodes if k.pred == q]
                pairs = tr.call_success_pairs(pred)
                calls = tr.calls_of(pred)
                if calls:
                    assert nodes, f"{root}/{domain_id}: no node for called pred {q}"
                arity = int(pred.rsplit("/", 1)[1])
                names = [f"H{i}" for i in range(arity)]
                hvars = tuple(Var(n) for n in names)

                def admitted(value, goal):
                    s = {v: a for v, a in zip(hvars, goal.args)} if arity else {}
                    if domain_id == "modes":
                        return modes_value_admits(domain, value, names, s)
                    if domain_id == "pairsh":
                        return pairsh_value_admits(domain, value, names, s)
                    return regtypes_value_admits(w, domain, value, names, s)

                from hornfly.adomains.transfer import rename_payload_onto
                from hornfly.terms import Struct

                goalpat = Struct(pred.rsplit("/", 1)[0], hvars) if arity else None
                rendered = []
                for key, node in nodes:
                    lam_c = rename_payload_onto(domain, key.payload, goalpat) if arity else domain.top([])
                    lam_s = (
                        domain.bottom()
                        if node.lambda_s == "bottom"
                        else (rename_payload_onto(domain, node.lambda_s, goalpat) if arity else domain.top([]))
                    )
                    rendered.append((lam_c, lam_s))
                for cg in calls:
                    ok = any(admitted(lc, cg) for lc, _ls in rendered)
                    assert ok, f"{root}/{domain_id}: call {cg} not covered for {q}"
                for cg, sg in pairs:
                    ok = any(
                        admitted(lc, cg) and admitted(ls, sg) for lc, ls in rendered
                    )
                    assert ok, f"{root}/{domain_id}: pair {cg} -> {sg} not covered for {q}"
