import json
import math

import pytest
from hypothesis import given, settings, strategies as st

from stlr.dlr import (
    dlr_check, finite_check, leq_check, metric_check, null_check, recheck, symmetry_swap,
    weakly_bounded,
)
from stlr.errors import GeneratorExhausted, SortError, TypeCheckError
from stlr.sampling import Sampler, metric_elem
from stlr.sensitivity import derive_self_distance
from stlr.syntax import ast as A
from stlr.syntax.parser import parse_diff, parse_term, parse_type

R = A.Real
RR = parse_type("Real -> Real")
SIN, ID = parse_term(r"\x:Real. sin x"), parse_term(r"\x:Real. x")
SIN_ID = parse_diff("dlam (x, e). e + abs(x - sin(x))", RR)


def lit(x):
    return A.Lit(x)


def test_real_examples():
    assert dlr_check(lit(3.0), A.Const(1.0), lit(4.0), R).status == "exact_pass"
    v = dlr_check(lit(3.0), A.Const(0.5), lit(4.0), R)
    assert v.status == "exact_fail" and v.seed is None
    assert v.witness["distance"] == 1.0 and v.witness["bound"] == 0.5


def test_running_example():
    v = dlr_check(SIN, SIN_ID, ID, RR, Sampler(seed=3), 2000)
    assert v.status == "pass_sampled" and v.trials == 2000 and v.seed == 3


def test_identity_is_refuted_by_zero():
    v = dlr_check(ID, parse_diff("dlam (x, e). 0", RR), ID, RR, Sampler(), 100)
    assert v.status == "counterexample"
    assert recheck(v.witness)


def test_both_conclusions_are_checked():
    # f(x, e) = |x - sin x| covers only the unswapped pair (sin V, W) when e = 0
    d = parse_diff("dlam (x, e). abs(x - sin(x))", RR)
    v = dlr_check(SIN, d, ID, RR, Sampler(seed=1), 2000)
    assert v.status == "counterexample"
    assert recheck(v.witness)


def test_products():
    ty = parse_type("Real * Real")
    m, n = parse_term("<1.0, 2.0>"), parse_term("<1.5, 2.0>")
    assert dlr_check(m, parse_diff("<0.5, 0>", ty), n, ty).status == "exact_pass"
    v = dlr_check(m, parse_diff("<0.25, 0>", ty), n, ty)
    assert v.status == "exact_fail"
    assert v.witness["path"] == [{"proj": "fst"}]


def test_higher_order_argument():
    ty = parse_type("(Real -> Real) -> Real")
    t = parse_term(r"\f:Real -> Real. f 1.0")
    d = derive_self_distance({}, t).expr
    assert dlr_check(t, d, t, ty, Sampler(seed=2), 300).status == "pass_sampled"


def test_generator_depth_is_enforced():
    ty = parse_type("((Real -> Real) -> Real) -> Real")
    t = parse_term(r"\g:(Real -> Real) -> Real. g sin")
    d = derive_self_distance({}, t).expr
    with pytest.raises(GeneratorExhausted):
        dlr_check(t, d, t, ty, Sampler(depth=1), 10)
    assert dlr_check(t, d, t, ty, Sampler(depth=2), 20).passed


def test_input_validation():
    with pytest.raises(TypeCheckError):
        dlr_check(SIN, SIN_ID, lit(1.0), RR)
    with pytest.raises(SortError):
        dlr_check(SIN, A.Const(1.0), ID, RR)
    with pytest.raises(ValueError):
        dlr_check(SIN, SIN_ID, ID, RR, trials=0)


def test_same_seed_same_verdict():
    d = parse_diff("dlam (x, e). e + 0.1", RR)
    m = parse_term(r"\x:Real. mul2 x")
    a = dlr_check(m, d, ID, RR, Sampler(seed=9), 500)
    b = dlr_check(m, d, ID, RR, Sampler(seed=9), 500)
    assert a == b
    assert json.loads(a.dumps())["seed"] == 9


def test_trial_records():
    record = []
    dlr_check(SIN, SIN_ID, ID, RR, Sampler(seed=0), 50, record=record)
    assert len(record) == 50
    for rec in record:
        assert rec.lhs_vw == math.sin(rec.v.value)
        assert rec.rhs_wv == rec.v.value


# -- symmetry ---------------------------------------------------------------

@pytest.mark.parametrize("m,d,n,status", [
    (3.0, 1.0, 4.0, "exact_pass"),
    (3.0, 0.5, 4.0, "exact_fail"),
])
def test_symmetry_at_real(m, d, n, status):
    res = symmetry_swap(lit(m), A.Const(d), lit(n), R)
    assert res.agree
    assert res.forward.status == res.backward.status == status


def test_symmetry_running_example():
    res = symmetry_swap(SIN, SIN_ID, ID, RR, Sampler(seed=4), 1000)
    assert res.agree and res.forward.status == "pass_sampled"
    assert res.to_json()["status"] == "agree"


# -- sets -------------------------------------------------------------------

def test_null_set():
    assert null_check(A.Const(0.0), R).status == "exact_pass"
    assert null_check(A.Const(1.0), R).status == "exact_fail"
    assert null_check(parse_diff("dlam (x, e). e", RR), RR).status == "pass_sampled"
    v = null_check(parse_diff("dlam (x, e). 1", RR), RR)
    assert v.status == "counterexample" and recheck(v.witness)
    ty = parse_type("Real -> Real -> Real")
    assert null_check(parse_diff("dlam (x, e). dlam (y, f). e + f", ty), ty).passed


def test_metric_set():
    assert metric_check(A.Const(2.0), R, 2.0).status == "exact_pass"
    assert metric_check(A.Const(1.0), R, 2.0).status == "exact_fail"
    assert metric_check(parse_diff("dlam (x, e). e", RR), RR, 0.0).status == "pass_sampled"
    assert metric_check(parse_diff("dlam (x, e). e + 1", RR), RR, 1.0).passed
    v = metric_check(parse_diff("dlam (x, e). e + 1", RR), RR, 0.0)
    assert v.status == "counterexample" and recheck(v.witness)


@pytest.mark.parametrize("text", ["Real", "Real -> Real", "Real * Real", "Real -> Real -> Real",
                                  "(Real -> Real) -> Real"])
def test_metric_elements_are_members(text):
    ty = parse_type(text)
    for r in (0.0, 1.5, 4.0):
        assert metric_check(metric_elem(ty, r), ty, r, Sampler(seed=1), 200).passed


def test_finite_set():
    assert finite_check(parse_diff("dlam (x, e). (x + e) * (x + e)", RR), RR).status == "pass_sampled"
    assert finite_check(A.Infinity(), R).status == "exact_fail"
    assert finite_check(parse_diff("dlam (x, e). e", RR), RR).status == "pass_sampled"
    v = finite_check(parse_diff("dlam (x, e). inf", RR), RR)
    assert v.status == "counterexample" and recheck(v.witness)


# -- weak boundedness ------------------------------------------------------

@pytest.mark.parametrize("text,expected", [
    (r"\x:Real. sin x", True),
    (r"\x:Real. recip x", False),
    ("3.0", True),
    (r"\x:Real. div <x, 2.0>", False),
    (r"ifz(sin, exp)", True),
])
def test_weakly_bounded(text, expected):
    assert weakly_bounded(parse_term(text)) is expected


# -- properties ---------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_counterexamples_replay(seed):
    s = Sampler(seed=seed)
    rng = s.rng("case")
    d = s.diff_expr(RR, rng, finite=True)
    m = parse_term(rng.choice([r"\x:Real. x", r"\x:Real. mul2 x", r"\x:Real. sin x", "add1"]))
    v = dlr_check(m, d, ID, RR, s, 200)
    if v.status == "counterexample":
        assert recheck(v.witness)
        # a loosened bound no longer witnesses a violation
        loose = dict(v.witness, diff="dlam (x, e). inf")
        assert not recheck(loose)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_upward_closure_inside_null(seed):
    # d in Z and d <= d' in Z: a pass for d stays a pass for d'
    s = Sampler(seed=seed)
    rng = s.rng("z")
    d = s.null_expr(RR, rng)
    d2 = parse_diff("dlam (x, e). e + e + e + e", RR)
    assert null_check(d, RR, s, 100).passed
    assert null_check(d2, RR, s, 100).passed
    if not leq_check(d, d2, RR, s, 100).passed:
        return
    for m in (ID, parse_term(r"\x:Real. sin x"), parse_term("add1")):
        if dlr_check(m, d, m, RR, s, 200).passed:
            assert dlr_check(m, d2, m, RR, s, 200).passed
