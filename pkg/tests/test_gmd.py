import itertools
import math
import sys
from importlib import resources

import pytest

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from stlr.dlr import dlr_check
from stlr.errors import GmdError
from stlr.gmd import (
    GmdArrow, GmdObject, SIZE_GUARD, Table, all_arrows, arrows_equal, bundled_arrows,
    bundled_objects, chain_quantale, check_arrow, check_gmd, check_quantale, discrete_object,
    exponential_size, gmd_arrow_product, gmd_bang, gmd_compose, gmd_exponential, gmd_id,
    gmd_product, gmd_terminal, law_suite, load_instances, table_quantale,
)
from stlr.syntax import ast as A

C2, C3, C4 = chain_quantale(2), chain_quantale(3), chain_quantale(4)
OBJS = {o.name: o for o in bundled_objects()}


def table_arrow(src, dst, fmap, zmap, name="t"):
    return GmdArrow(src, dst, fmap.__getitem__, lambda q, a: zmap[q, a], name)


# -- quantales -----------------------------------------------------------------

def test_chains_are_quantales():
    assert check_quantale(C2).passed
    assert check_quantale(C4).passed
    assert C4.mult(2, 3) == 3 and C4.mult(1, 1) == 2


def test_non_associative_mult_is_rejected():
    # |a - b| on the chain {0, 1, 2, 3} is commutative and unital but nothing more
    carrier = [0, 1, 2, 3]
    leq = [(a, b) for a in carrier for b in carrier if a <= b]
    mult = {(a, b): abs(a - b) for a in carrier for b in carrier}
    rep = check_quantale(table_quantale(carrier, leq, mult, 0))
    assert not rep.passed
    assert rep["commutative"].passed and rep["unit"].passed
    assert not rep["associative"].passed
    a, b, c = rep["associative"].witness
    assert abs(abs(a - b) - c) != abs(a - abs(b - c))
    assert not rep["join_distributive"].passed


def test_missing_join_is_reported():
    # two incomparable elements and no top
    q = table_quantale(["x", "y"], [], {(a, b): a for a in "xy" for b in "xy"}, "x")
    assert not check_quantale(q)["complete_lattice"].passed


# -- objects -------------------------------------------------------------------

def test_discrete_object():
    assert check_gmd(discrete_object(["a", "b", "c"], C3)).passed


def test_one_point_with_positive_self_distances():
    o = GmdObject(["u"], C4, [("u", q, "u") for q in range(1, 4)])
    assert check_gmd(o).passed


def test_indistancy_failure():
    rep = check_gmd(GmdObject(["a", "b"], C2, [("a", 0, "b"), ("b", 0, "a")]))
    assert not rep["indistancy"].passed
    assert rep["indistancy"].witness in {("a", "b"), ("b", "a")}


def test_symmetry_and_triangularity_failures():
    assert not check_gmd(GmdObject(["a", "b"], C3, [("a", 1, "b")]))["symmetry"].passed
    # a-b and b-c at 1, b at 0 from itself, but nothing between a and c
    delta = [("a", 1, "b"), ("b", 1, "a"), ("b", 1, "c"), ("c", 1, "b"), ("b", 0, "b")]
    rep = check_gmd(GmdObject("abc", C3, delta))
    assert not rep["triangularity"].passed


def test_triangularity_uses_the_middle_self_distance():
    # without a self-distance at b there is no three-hop instance through b
    delta = [("a", 1, "b"), ("b", 1, "a"), ("b", 1, "c"), ("c", 1, "b")]
    assert check_gmd(GmdObject("abc", C3, delta)).passed


def test_malformed_delta():
    assert not check_gmd(GmdObject(["a"], C2, [("a", 5, "a")]))["well_formed"].passed


def test_bundled_objects_pass():
    for o in bundled_objects():
        assert check_gmd(o).passed, o


# -- category ------------------------------------------------------------------

def test_identity_and_composition():
    d2, u1 = OBJS["D2"], OBJS["U1"]
    swap = table_arrow(d2, d2, {"a": "b", "b": "a"}, {(q, x): q for q in (0, 1) for x in "ab"})
    collapse = table_arrow(d2, u1, {"a": "u", "b": "u"}, {(q, x): 1 + 2 * q for q in (0, 1) for x in "ab"})
    for a in (swap, collapse):
        assert check_arrow(a).passed
        assert arrows_equal(gmd_compose(gmd_id(a.dst), a), a).passed
        assert arrows_equal(gmd_compose(a, gmd_id(a.src)), a).passed
    c = gmd_compose(collapse, swap)
    assert check_arrow(c).passed
    for q in (0, 1):
        for x in "ab":
            assert c.zeta(q, x) == collapse.zeta(swap.zeta(q, x), swap.f(x))


def test_associativity_on_enumerated_arrows():
    d2 = OBJS["D2"]
    arrows = all_arrows(d2, d2)
    assert len(arrows) > 1
    for f, g, h in itertools.product(arrows[:4], repeat=3):
        assert arrows_equal(gmd_compose(gmd_compose(h, g), f), gmd_compose(h, gmd_compose(g, f))).passed


def test_compose_mismatch():
    with pytest.raises(GmdError):
        gmd_compose(gmd_id(OBJS["D2"]), gmd_id(OBJS["U1"]))


def test_invalid_arrow_is_detected():
    d2, p2 = OBJS["D2"], OBJS["P2"]
    # P2 points sit at distance >= 2, which D2 cannot reproduce for distinct images
    bad = table_arrow(p2, d2, {"p": "a", "q": "b"}, {(q, x): 1 for q in range(3) for x in "pq"})
    rep = check_arrow(bad)
    assert not rep["arrow_condition"].passed


# -- terminal and products -----------------------------------------------------

def test_terminal():
    one = gmd_terminal()
    assert check_gmd(one).passed
    for o in bundled_objects():
        arrows = all_arrows(o, one)
        assert len(arrows) == 1
        assert arrows_equal(arrows[0], gmd_bang(o)).passed


def test_product_of_points_is_a_point():
    p = gmd_product(OBJS["D1"], OBJS["U1"])
    assert len(p.obj.carrier) == 1
    assert check_gmd(p.obj).passed


def test_product_beta_two_by_three():
    p2, l3 = OBJS["P2"], OBJS["L3"]
    prod = gmd_product(p2, l3)
    assert len(prod.obj.carrier) == 6
    assert check_gmd(prod.obj).passed
    src = OBJS["D2"]
    fs, gs = all_arrows(src, p2), all_arrows(src, l3, limit=100_000)
    assert fs and gs
    for f in fs[:5]:
        for g in gs[::max(1, len(gs) // 5)]:
            h = prod.pair(f, g)
            assert check_arrow(h).passed
            assert arrows_equal(gmd_compose(prod.proj1, h), f).passed
            assert arrows_equal(gmd_compose(prod.proj2, h), g).passed


def test_projections_are_arrows():
    prod = gmd_product(OBJS["D2"], OBJS["P2"])
    assert check_arrow(prod.proj1).passed and check_arrow(prod.proj2).passed
    assert prod.proj1.zeta((1, 2), ("a", "p")) == 1


def test_arrow_product():
    d2 = OBJS["D2"]
    f = all_arrows(d2, d2)[-1]
    fg = gmd_arrow_product(f, gmd_id(OBJS["U1"]))
    assert check_arrow(fg).passed


# -- exponentials --------------------------------------------------------------

def test_exponential_of_points():
    e = gmd_exponential(OBJS["D1"], OBJS["U1"])
    assert len(e.obj.carrier) == 1
    assert check_gmd(e.obj).passed
    assert check_arrow(e.eval_arrow).passed


def test_exponential_beta_two_by_two():
    b, c = OBJS["D2"], OBJS["D2"]
    e = gmd_exponential(b, c)
    assert check_gmd(e.obj).passed
    assert check_arrow(e.eval_arrow).passed
    gs = all_arrows(gmd_product(OBJS["D1"], b).obj, c)
    assert gs
    for g in gs:
        lam = e.curry(g)
        assert check_arrow(lam).passed
        back = gmd_compose(e.eval_arrow, gmd_arrow_product(lam, gmd_id(b)))
        assert arrows_equal(back, g).passed


def test_curry_of_a_projection():
    a, b = OBJS["D2"], OBJS["D2"]
    prod = gmd_product(a, b)
    e = gmd_exponential(b, a)
    lam = e.curry(prod.proj1)
    assert check_arrow(lam).passed
    assert lam.f("a") == Table(b.carrier, ["a", "a"])
    back = gmd_compose(e.eval_arrow, gmd_arrow_product(lam, gmd_id(b)))
    assert arrows_equal(back, prod.proj1).passed


def test_curry_needs_a_matching_arrow():
    e = gmd_exponential(OBJS["D2"], OBJS["D2"])
    with pytest.raises(GmdError):
        e.curry(gmd_id(OBJS["D2"]))


def test_size_guard():
    assert SIZE_GUARD == 10**6
    l3 = OBJS["L3"]
    assert exponential_size(l3, l3) > SIZE_GUARD
    with pytest.raises(GmdError, match="guard"):
        gmd_exponential(l3, l3)
    with pytest.raises(GmdError):
        all_arrows(l3, l3, limit=10)


def test_exponential_indistancy_gap():
    # B has a point without any self-distance; functions that differ there
    # are never constrained, so they end up at the unit distance
    b = GmdObject([0, 1], C2, [(1, 0, 1)], name="B")
    c = discrete_object(["x", "y"], C2, "C")
    assert check_gmd(b).passed and check_gmd(c).passed
    e = gmd_exponential(b, c)
    rep = check_gmd(e.obj)
    assert not rep["indistancy"].passed
    f, g = rep["indistancy"].witness
    assert f != g and f(1) == g(1)


def test_curry_gap():
    # every distance holds between distinct points, and 0 only on the diagonal
    t2 = GmdObject([0, 1], C2, [(x, 1, y) for x in (0, 1) for y in (0, 1)] + [(0, 0, 0), (1, 0, 1)],
                   name="T2")
    l3 = OBJS["L3"]
    prod = gmd_product(t2, t2).obj
    fmap = {(0, 0): 2, (0, 1): 1, (1, 0): 2, (1, 1): 0}
    zvals = [3, 2, 0, 2, 1, 3, 3, 3, 1, 1, 2, 1, 3, 1, 2, 2]
    keys = [((q, s), (x, y)) for q in (0, 1) for s in (0, 1) for x in (0, 1) for y in (0, 1)]
    g = table_arrow(prod, l3, fmap, dict(zip(keys, zvals)), "g")
    assert check_arrow(g).passed
    e = gmd_exponential(t2, l3)
    lam = e.curry(g)
    # the transpose asks for distances at mixed points the arrow condition of g never sees
    assert not check_arrow(lam)["arrow_condition"].passed
    # the beta law itself is unaffected
    back = gmd_compose(e.eval_arrow, gmd_arrow_product(lam, gmd_id(t2)))
    assert arrows_equal(back, g).passed


# -- the exponential against the arrow clause at Real -> Real ------------------

# two sample reals, with the chain 0 < 1 < top read as 0, 1, inf
POINTS = (0.0, 1.0)
SCALE = (0.0, 1.0, math.inf)


def _discrete_reals():
    delta = [(i, e, j) for i in (0, 1) for j in (0, 1) for e in range(3)
             if abs(POINTS[i] - POINTS[j]) <= SCALE[e]]
    return GmdObject([0, 1], C3, delta, name="R2")


def _real_leaf(x, e, y):
    d = A.Infinity() if SCALE[e] == math.inf else A.Const(SCALE[e])
    return dlr_check(A.Lit(POINTS[x]), d, A.Lit(POINTS[y]), A.Real).passed


def test_structural_echo():
    r2 = _discrete_reals()
    assert check_gmd(r2).passed
    e = gmd_exponential(r2, r2)
    keys = e.obj.exponent
    fs = e.obj.carrier
    member = {(f, d, g) for f, d, g in e.obj.delta}
    seen = 0
    for f in fs:
        for g in fs:
            for vals in itertools.product(range(3), repeat=len(keys)):
                d = Table(keys, vals)
                # the arrow clause: related inputs V, W at e give related
                # outputs (M V, N W) and (M W, N V), both at d(e, V)
                clause = all(
                    _real_leaf(f(v), d(s, v), g(w)) and _real_leaf(f(w), d(s, v), g(v))
                    for v, s, w in r2.delta
                )
                assert clause == ((f, d, g) in member), (f, d, g)
                seen += clause
    assert 0 < seen < len(member) + 1


# -- bundled suite and instance files -------------------------------------------

def test_law_suite_on_small_bundle():
    objs = [OBJS["D1"], OBJS["D2"], OBJS["U1"]]
    curried = all_arrows(gmd_product(OBJS["D1"], OBJS["D2"]).obj, OBJS["D2"])
    rep = law_suite(objs, bundled_arrows(objs, per_pair=3), curry_arrows=curried)
    assert rep.passed, rep.failures()
    assert all(r.checked > 0 for r in rep.results)


def test_law_suite_reports_a_bad_arrow():
    d2, p2 = OBJS["D2"], OBJS["P2"]
    bad = table_arrow(p2, d2, {"p": "a", "q": "b"}, {(q, x): 1 for q in range(3) for x in "pq"}, "bad")
    rep = law_suite([d2, p2], [bad], products=False, exponentials=False)
    assert not rep["arrow_condition"].passed


def test_load_bundled_instances():
    text = (resources.files("stlr") / "corpus" / "gmd_small.toml").read_text()
    quantales, objects, arrows = load_instances(tomllib.loads(text))
    assert set(objects) == {"D2", "U1", "P2"}
    for o in objects.values():
        assert check_gmd(o).passed
    for a in arrows.values():
        assert check_arrow(a).passed, a
    first = arrows["first"]
    prod = gmd_product(objects["D2"], objects["U1"])
    assert arrows_equal(first, prod.proj1).passed


@pytest.mark.parametrize("doc,msg", [
    ({"object": {"X": {"carrier": ["a"], "quantale": "nope"}}}, "unknown"),
    ({"quantale": {"Q": {"carrier": [0]}}}, "malformed"),
    ({"quantale": {"Q": {"chain": 2}}, "object": {"X": {"carrier": ["a"], "quantale": "Q", "discrete": True}},
      "arrow": {"f": {"src": "X", "dst": "X", "map": [["a", "a"]], "zeta": []}}}, "undefined"),
    ({"arrow": {"f": {"src": "Y", "dst": "Y", "map": [], "zeta": []}}}, "unknown object"),
])
def test_malformed_instances(doc, msg):
    with pytest.raises(GmdError, match=msg):
        load_instances(doc)
