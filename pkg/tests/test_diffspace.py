import math

import pytest
from hypothesis import given, strategies as st

from stlr.diffspace import (
    Tup, bottom_expr, check_sort, check_value_sort, diff_eval, dv_mult, dv_sup, finite_sup,
    quantale_mult, quantale_unit, real_distance, real_distance_within, top_expr,
)
from stlr.dlr import leq_check, recheck
from stlr.errors import SortError
from stlr.sampling import Sampler
from stlr.syntax import ast as A
from stlr.syntax.parser import parse_diff, parse_type

INF = math.inf
R = A.Real
RR = parse_type("Real -> Real")
RxR = parse_type("Real * Real")
diffs = st.one_of(st.just(INF), st.just(0.0), st.floats(0, 1e300))


def ev(text, ty=R, **env):
    return diff_eval(parse_diff(text, ty))


def test_running_example_difference():
    f = ev("dlam (x, e). e + abs(x - sin(x))", RR)
    assert f(0.0, 0.5) == 0.5
    assert f(math.pi, 0.0) == abs(math.pi - math.sin(math.pi))


def test_constants():
    assert ev("inf + 1") == INF
    assert ev("sup{1, 2}") == 2.0
    assert ev("sup{1, 2, inf}") == INF
    assert ev("sup{}") == 0.0


def test_invalid_values():
    with pytest.raises(SortError, match="negative"):
        diff_eval(A.Const(-1.0))
    with pytest.raises(SortError, match="nan"):
        diff_eval(A.Const(math.nan))
    with pytest.raises(SortError):
        check_sort(A.Const(1.0), RR)
    with pytest.raises(SortError):
        check_value_sort(Tup(1.0, 2.0), R)


def test_scalar_must_be_nonnegative():
    d = parse_diff("dlam (x, e). x", RR)
    f = diff_eval(d)
    assert f(2.0, 0.0) == 2.0
    with pytest.raises(SortError):
        f(-2.0, 0.0)


def test_mult_examples():
    assert diff_eval(quantale_mult(A.Const(2.0), A.Const(3.0), R)) == 5.0
    assert diff_eval(quantale_mult(A.Infinity(), A.Const(0.0), R)) == INF
    pair = quantale_mult(A.DPair(A.Const(1.0), A.Const(2.0)), A.DPair(A.Const(3.0), A.Const(4.0)), RxR)
    assert diff_eval(pair) == Tup(4.0, 6.0)


def test_units_and_bounds():
    assert quantale_unit(R) == A.Const(0.0)
    assert quantale_unit(RxR) == A.DPair(A.Const(0.0), A.Const(0.0))
    u = quantale_unit(RR)
    assert isinstance(u, A.DLam) and u.body == A.Const(0.0)
    assert diff_eval(bottom_expr(R)) == 0.0
    assert diff_eval(top_expr(RR))(1.0, 0.0) == INF
    assert diff_eval(finite_sup([], RR))(3.0, 2.0) == 0.0


def test_non_idempotent():
    assert dv_mult(1.0, 1.0) == 2.0


@given(diffs, diffs, diffs)
def test_quantale_and_lattice_laws_at_real(a, b, c):
    assert dv_mult(a, b) == dv_mult(b, a)
    assert dv_mult(a, 0.0) == a
    assert dv_mult(a, dv_sup([b, c])) == dv_sup([dv_mult(a, b), dv_mult(a, c)])
    assert dv_sup([a, a]) == a
    assert dv_sup([a, b]) == dv_sup([b, a])
    assert dv_sup([dv_sup([a, b]), c]) == dv_sup([a, dv_sup([b, c])])
    if a <= b:
        assert dv_sup([a, c]) <= dv_sup([b, c])


@given(diffs, diffs)
def test_leq_agrees_with_numeric_order(a, b):
    num = lambda x: A.Infinity() if x == INF else A.Const(x)
    v = leq_check(num(a), num(b), R)
    assert v.exact and v.passed == (a <= b)


def test_leq_examples():
    assert leq_check(A.Const(1.0), A.Const(2.0), R).status == "exact_pass"
    zero, ident = parse_diff("dlam (x, e). 0", RR), parse_diff("dlam (x, e). e", RR)
    assert leq_check(zero, ident, RR, Sampler(seed=0), 1000).status == "pass_sampled"
    v = leq_check(ident, zero, RR, Sampler(seed=0), 1000)
    assert v.status == "counterexample"
    step = v.witness["path"][0]
    assert float(step["y"]) > 0
    assert recheck(v.witness)


def test_leq_at_products_is_componentwise():
    a = parse_diff("<1, 2>", RxR)
    assert leq_check(a, parse_diff("<1, 3>", RxR), RxR).status == "exact_pass"
    v = leq_check(a, parse_diff("<2, 1>", RxR), RxR)
    assert v.status == "exact_fail"
    assert v.witness["path"] == [{"proj": "snd"}]


TYPES = [RR, RxR, parse_type("Real -> Real -> Real"), parse_type("Real * Real -> Real"),
         parse_type("(Real -> Real) * Real")]


@pytest.mark.parametrize("ty", TYPES)
def test_quantale_laws_pointwise(ty):
    s = Sampler(seed=11)
    rng = s.rng("laws")
    for i in range(200):
        # a fresh seed per round, so each round compares at a new input
        p = Sampler(seed=i)
        a, b, c = (s.diff_expr(ty, rng) for _ in range(3))
        ab, ba = quantale_mult(a, b, ty), quantale_mult(b, a, ty)
        unit = quantale_mult(a, quantale_unit(ty), ty)
        lhs = quantale_mult(a, finite_sup([b, c], ty), ty)
        rhs = finite_sup([quantale_mult(a, b, ty), quantale_mult(a, c, ty)], ty)
        for x, y in ((ab, ba), (unit, a), (lhs, rhs)):
            assert leq_check(x, y, ty, p, 1).passed
            assert leq_check(y, x, ty, p, 1).passed


@pytest.mark.parametrize("ty", TYPES)
def test_sup_is_least_upper_bound_pointwise(ty):
    s = Sampler(seed=12)
    rng = s.rng("sup")
    for i in range(200):
        p = Sampler(seed=i)
        items = [s.diff_expr(ty, rng) for _ in range(3)]
        sup = finite_sup(items, ty)
        for d in items:
            assert leq_check(d, sup, ty, p, 1).passed
        assert leq_check(finite_sup([], ty), sup, ty, p, 1).passed
        assert leq_check(sup, finite_sup(items + items, ty), ty, p, 1).passed


@given(st.floats(-1e9, 1e9), st.floats(-1e9, 1e9))
def test_real_distance_is_an_upper_bound(a, b):
    from fractions import Fraction
    d = real_distance(a, b)
    assert Fraction(d) >= abs(Fraction(a) - Fraction(b))
    assert real_distance_within(a, b, d)
    assert real_distance_within(a, b, INF)
    if a != b:
        assert not real_distance_within(a, b, 0.0)


def test_equal_infinities_are_at_distance_zero():
    assert real_distance_within(INF, INF, 0.0)
    assert not real_distance_within(INF, -INF, 1e308)
