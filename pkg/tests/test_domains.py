"""Lattice laws, transfer soundness, and abstraction exactness.

Lattice laws are property-tested over random values. Transfer soundness
is checked against concrete unification: whenever a concrete
substitution survives x = t, its (independently computed) abstraction
must stay below the amgu result of its abstraction.
"""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hornfly import kernels
from hornfly.adomains import BOTTOM, get_domain
from hornfly.adomains.regtypes import ANY, ATM, NONE, NUM, VART, RNamed
from hornfly.frontend import read_term
from hornfly.oracle import sample_terms, unify
from hornfly.oracle.unify import resolve
from hornfly.terms import Struct, Var

from conftest import build_workspace
from helpers import (
    abstract_subst_modes,
    abstract_subst_pairsh,
    gamma_member,
    modes_value_admits,
    pairsh_value_admits,
    regtypes_value_admits,
)

VARS = ("W", "X", "Y", "Z")


@pytest.fixture(scope="module")
def ws():
    return build_workspace("nrev.pl")


def _domain(ws, domain_id):
    return get_domain(domain_id, ws.prop_table)


# -- value strategies ---------------------------------------------------

modes_values = st.builds(
    lambda codes: get_domain("modes")._mk(VARS, bytes(codes)),
    st.lists(st.integers(0, 3), min_size=4, max_size=4),
)


def _pairsh_from(ground, free, bits):
    d = get_domain("pairsh")
    n = len(VARS)
    share = [0] * n
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            if bits & (1 << k):
                share[i] |= 1 << j
                share[j] |= 1 << i
            k += 1
    return d._mk(tuple(VARS), (ground, free, tuple(share)))


pairsh_values = st.builds(
    _pairsh_from,
    st.integers(0, 15),
    st.integers(0, 15),
    st.integers(0, 63),
)

_TYPE_POOL = [
    NONE,
    ANY,
    NUM,
    ATM,
    VART,
    RNamed("color/1"),
    RNamed("list/1"),
    RNamed("list/2", (NUM,)),
    RNamed("list/2", (RNamed("color/1"),)),
    RNamed("list/2", (ANY,)),
    RNamed("tree/1"),
    RNamed("arithexpr/1"),
]


def regtypes_values(ws):
    d = _domain(ws, "regtypes")
    return st.builds(
        lambda ts: d._mk(VARS, ts),
        st.tuples(*[st.sampled_from(_TYPE_POOL)] * len(VARS)),
    )


def _strategies(ws, domain_id):
    if domain_id == "modes":
        return modes_values
    if domain_id == "pairsh":
        return pairsh_values
    return regtypes_values(ws)


# -- lattice laws ---------------------------------------------------------


@pytest.mark.parametrize("domain_id", ["modes", "pairsh", "regtypes"])
def test_lattice_laws(ws, domain_id):
    domain = _domain(ws, domain_id)
    values = _strategies(ws, domain_id)

    @settings(max_examples=120, deadline=None)
    @given(values, values, values)
    def laws(a, b, c):
        # reflexivity, lub/glb bounds and ordering consistency
        assert domain.leq(a, a)
        j = domain.lub(a, b)
        m = domain.glb(a, b)
        assert domain.leq(a, j) and domain.leq(b, j)
        assert domain.leq(m, a) and domain.leq(m, b)
        # commutativity and idempotence
        assert domain.equal(j, domain.lub(b, a))
        assert domain.equal(m, domain.glb(b, a))
        assert domain.equal(domain.lub(a, a), a)
        assert domain.equal(domain.glb(a, a), a)
        # antisymmetry
        if domain.leq(a, b) and domain.leq(b, a):
            assert domain.equal(a, b)
        # transitivity
        if domain.leq(a, b) and domain.leq(b, c):
            assert domain.leq(a, c)
        # absorption with bottom/top
        bot = domain.bottom()
        top = domain.top(VARS)
        assert domain.equal(domain.lub(a, bot), a)
        assert domain.is_bottom(domain.glb(a, bot))
        assert domain.leq(a, top)
        assert domain.equal(domain.glb(a, top), a)

    laws()


@pytest.mark.parametrize("domain_id", ["modes", "pairsh", "regtypes"])
def test_lub_is_least_upper_bound(ws, domain_id):
    domain = _domain(ws, domain_id)
    values = _strategies(ws, domain_id)

    @settings(max_examples=80, deadline=None)
    @given(values, values, values)
    def least(a, b, c):
        j = domain.lub(a, b)
        if domain.leq(a, c) and domain.leq(b, c):
            assert domain.leq(j, c)

    least()


@pytest.mark.parametrize("domain_id", ["modes", "pairsh"])
def test_glb_is_greatest_lower_bound(ws, domain_id):
    # exact for the finite domains; regtypes' meet is the poset meet over
    # the declared universe and is only tested for bound-ness above
    domain = _domain(ws, domain_id)
    values = _strategies(ws, domain_id)

    @settings(max_examples=80, deadline=None)
    @given(values, values, values)
    def greatest(a, b, c):
        m = domain.glb(a, b)
        if domain.leq(c, a) and domain.leq(c, b):
            assert domain.leq(c, m)

    greatest()


# -- widening ----------------------------------------------------------------


@pytest.mark.parametrize("domain_id", ["modes", "pairsh", "regtypes"])
def test_widen_above_lub_and_stabilizes(ws, domain_id):
    domain = _domain(ws, domain_id)
    rng = random.Random(5)
    if domain_id == "regtypes":
        seq = [RNamed("list/2", (NUM,))]
        for _ in range(8):
            seq.append(RNamed("list/2", (seq[-1],)))
        chain = [domain._mk(VARS, (t, ANY, ANY, ANY)) for t in seq]
    else:
        vals = (
            [get_domain("modes")._mk(VARS, bytes(rng.choices(range(4), k=4))) for _ in range(9)]
            if domain_id == "modes"
            else [_pairsh_from(rng.randrange(16), rng.randrange(16), rng.randrange(64)) for _ in range(9)]
        )
        chain = vals
    acc = chain[0]
    stable_at = None
    for i, nxt in enumerate(chain[1:], 1):
        widened = domain.widen(acc, nxt)
        assert domain.leq(domain.lub(acc, nxt), widened)
        if domain.equal(widened, acc):
            stable_at = i
            break
        acc = widened
    if domain_id == "regtypes":
        # the depth bound caps the chain within 2k steps
        assert stable_at is not None and stable_at <= 2 * 3 + 1


# -- amgu soundness against concrete unification -------------------------------


@pytest.mark.parametrize("domain_id", ["modes", "pairsh", "regtypes"])
def test_amgu_soundness(ws, domain_id):
    domain = _domain(ws, domain_id)
    rng = random.Random(11)
    pool = sample_terms(rng, 120, depth=2)
    names = list(VARS)
    checked = 0
    for trial in range(400):
        sigma = {}
        for n in names:
            pick = rng.randrange(4)
            if pick == 0:
                continue  # leave free
            t = pool[rng.randrange(len(pool))]
            sigma[Var(n)] = t
        x = Var(rng.choice(names))
        t = _random_term_over(rng, names, pool)
        s2 = unify(Var(x.name), t, dict(sigma))
        if s2 is None:
            continue  # no concrete substitution: nothing to check
        checked += 1
        if domain_id == "modes":
            a0 = abstract_subst_modes(domain, names, sigma)
            out = domain.amgu(a0, x, t)
            assert modes_value_admits(domain, out, names, s2), (sigma, x, t)
        elif domain_id == "pairsh":
            a0 = abstract_subst_pairsh(domain, names, sigma)
            out = domain.amgu(a0, x, t)
            assert pairsh_value_admits(domain, out, names, s2), (sigma, x, t)
        else:
            a0 = domain.fresh(names)
            # abstract the pre-substitution independently via amgu on
            # fresh vars would be circular; start from the concrete
            # bindings expressed as unifications instead
            val = domain.fresh(names)
            ok = True
            for v, bound in sigma.items():
                val = domain.amgu(val, v, bound)
                if domain.is_bottom(val):
                    ok = False
                    break
            if not ok:
                continue
            out = domain.amgu(val, x, t)
            assert regtypes_value_admits(ws, domain, out, names, s2), (sigma, x, t)
    assert checked > 80


def _random_term_over(rng, names, pool):
    k = rng.randrange(5)
    if k == 0:
        return Var(rng.choice(names))
    if k == 1:
        return pool[rng.randrange(len(pool))]
    if k == 2:
        return Struct(".", (Var(rng.choice(names)), Var(rng.choice(names))))
    if k == 3:
        return Struct("f", (Var(rng.choice(names)),))
    return Struct(".", (pool[rng.randrange(len(pool))], Var(rng.choice(names))))


# -- spec'd examples -----------------------------------------------------------


def test_modes_lub_example():
    d = get_domain("modes")
    a = d._mk(("X",), bytes([kernels.GROUND]))
    b = d._mk(("X",), bytes([kernels.FREE]))
    assert d.render(d.lub(a, b)) == "{X:any}"


def test_pairsh_glb_unions_ground_and_drops_pairs():
    d = get_domain("pairsh")
    top = d.top(("X", "Y"))
    gx = d._mk(("X", "Y"), (0b01, 0, (0b10, 0b01)))  # X ground claimed, pair kept in input
    m = d.glb(top, gx)
    assert m.ground_vars() == {"X"}
    assert m.may_share_pairs() == set()  # pairs touching ground vars vanish


def test_pairsh_amgu_closure_example():
    # all free & independent, X = f(Y, Z): the (Y,Z) pair is deliberate
    d = get_domain("pairsh")
    v = d.fresh(("X", "Y", "Z"))
    out = d.amgu(v, Var("X"), read_term("f(Y, Z)").term)
    assert out.may_share_pairs() == {("X", "Y"), ("X", "Z"), ("Y", "Z")}
    assert out.may_free_vars() == {"Y", "Z"}


def test_modes_amgu_ground_example():
    d = get_domain("modes")
    v = d.top(("X",))
    out = d.amgu(v, Var("X"), read_term("[]").term)
    assert out.mode_of("X") == kernels.GROUND


def test_regtypes_amgu_positional_projection(ws):
    d = _domain(ws, "regtypes")
    v = d._mk(("H", "T", "X"), (VART, VART, RNamed("list/2", (RNamed("color/1"),))))
    out = d.amgu(v, Var("X"), read_term("[H|T]").term)
    assert out.type_of("H") == RNamed("color/1")
    assert out.type_of("T") == RNamed("list/2", (RNamed("color/1"),))


def test_regtypes_leq_and_glb_examples(ws):
    d = _domain(ws, "regtypes")
    env = ws.prop_table.env
    assert env.included(RNamed("color/1"), ANY)
    a = d._mk(("X",), (RNamed("color/1"),))
    b = d._mk(("X",), (NUM,))
    m = d.glb(a, b)
    assert m is not BOTTOM
    assert m.type_of("X") == NONE  # the clashing variable maps to none
    assert d.is_empty_value(m)


def test_gamma_membership_depth4_exactness(ws):
    """For exact regtypes, the enumeration oracle finds no separating term."""
    from hornfly.oracle import enum_terms

    env = ws.prop_table.env
    terms = [t for t in enum_terms(3) if len(str(t)) < 200][:400]
    for tref, prop in [
        (RNamed("color/1"), "color"),
        (RNamed("list/1"), "list"),
        (NUM, None),
        (ATM, None),
    ]:
        for t in terms:
            concrete = gamma_member(ws, tref, t)
            from hornfly.adomains.regtypes import shape_of

            abstracted = env.included(shape_of(t, {}), tref)
            assert abstracted == concrete, (tref, t)
