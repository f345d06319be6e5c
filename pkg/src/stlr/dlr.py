"""Membership checking for differential logical relations and the null,
metric and finite difference sets.

Every checker is refutation-sound and verification-incomplete.  At ``Real``
(and products of reals) the check is exact.  At arrow types each trial walks
one path through the type, sampling a premise at every arrow and checking both
conclusions.  Failures come back as witnesses that ``recheck`` can replay
without randomness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from . import evaluation as E
from .diffspace import (
    DFun, DiffValue, Tup, check_sort, diff_eval, real_distance, real_distance_within,
)
from .errors import SortError, StlrError, TypeCheckError
from .interval import INF, add_up
from .prims import resolve
from .sampling import Premise, Sampler, metric_elem
from .syntax import ast as A
from .syntax.parser import parse_diff, parse_term, parse_type
from .syntax.printer import format_real, print_diff, print_term, print_type
from .typecheck import check_against
from .verdict import Counterexample, ExactFail, ExactPass, PassSampled, SymmetryResult, Verdict

DEFAULT_TRIALS = 10_000


def _needs_sampling(ty: A.Type) -> bool:
    if isinstance(ty, A.RealT):
        return False
    if isinstance(ty, A.Prod):
        return _needs_sampling(ty.left) or _needs_sampling(ty.right)
    return True


def _diff_text(y: DiffValue, expr: A.DiffExpr | None) -> str:
    if expr is not None:
        return print_diff(expr)
    if isinstance(y, float):
        return format_real(y)
    return repr(y)


# ---------------------------------------------------------------------------
# DLR membership
# ---------------------------------------------------------------------------


@dataclass
class TrialRecord:
    """One sampled premise at an arrow type together with both conclusions."""
    path: tuple
    v: A.Term
    y: DiffValue
    w: A.Term
    bound: DiffValue
    lhs_vw: E.Value
    rhs_vw: E.Value
    lhs_wv: E.Value
    rhs_wv: E.Value


class _DlrWalk:
    def __init__(self, sampler: Sampler, registry, record: list | None, fuel: int = E.DEFAULT_FUEL):
        self.sampler = sampler
        self.registry = registry
        self.fuel = fuel
        self.machine = E.Machine(fuel, registry)
        self.record = record

    def fresh_machine(self) -> E.Machine:
        # fuel is a per-trial budget
        self.machine = E.Machine(self.fuel, self.registry)
        return self.machine

    def walk(self, mv: E.Value, d: DiffValue, nv: E.Value, ty: A.Type, rng, path: list):
        """Return a witness dict for a violation along one sampled path, else None."""
        if isinstance(ty, A.RealT):
            if not isinstance(d, float):
                raise SortError("difference at Real is not a number")
            if real_distance_within(mv, nv, d):
                return None
            return {
                "path": _path_json(path),
                "lhs_value": mv, "rhs_value": nv, "bound": d,
                "distance": real_distance(mv, nv),
            }
        if isinstance(ty, A.Prod):
            if not isinstance(d, Tup):
                raise SortError("difference at a product type is not a pair")
            m = self.machine
            for side, sub_ty, dd in (("fst", ty.left, d.left), ("snd", ty.right, d.right)):
                a = m.eval(mv.left if side == "fst" else mv.right, mv.env)
                b = m.eval(nv.left if side == "fst" else nv.right, nv.env)
                w = self.walk(a, dd, b, sub_ty, rng, path + [{"proj": side}])
                if w is not None:
                    return w
            return None
        if not isinstance(d, DFun):
            raise SortError("difference at an arrow type is not a function")
        prem: Premise = self.sampler.premise(ty.domain, rng, self.registry)
        m = self.machine
        bound = d(prem.v, prem.y)
        lhs_vw, rhs_vw = m.apply(mv, prem.v), m.apply(nv, prem.w)
        lhs_wv, rhs_wv = m.apply(mv, prem.w), m.apply(nv, prem.v)
        if self.record is not None:
            self.record.append(TrialRecord(
                tuple(p.get("proj", "arg") for p in path), prem.v_term, prem.y, prem.w_term,
                bound, lhs_vw, rhs_vw, lhs_wv, rhs_wv,
            ))
        for swapped, (a, b) in enumerate(((lhs_vw, rhs_vw), (lhs_wv, rhs_wv))):
            w = self.walk(a, bound, b, ty.codomain, rng, path + [(prem, bool(swapped))])
            if w is not None:
                return w
        return None


def _path_json(path: list) -> list:
    # premises are rendered only once a violation is found
    out = []
    for p in path:
        if isinstance(p, dict):
            out.append(p)
        else:
            prem, swapped = p
            out.append({
                "v": print_term(prem.v_term),
                "y": _diff_text(prem.y, prem.y_expr),
                "w": print_term(prem.w_term),
                "swapped": swapped,
            })
    return out


def _prepare(M: A.Term, d: A.DiffExpr, N: A.Term, at: A.Type, registry):
    for side, t in (("left", M), ("right", N)):
        try:
            check_against({}, t, at, registry=registry)
        except TypeCheckError as exc:
            raise TypeCheckError(f"{side} term is not of type {print_type(at)}: {exc}") from None
    check_sort(d, at, registry=registry)


def dlr_check(
    M: A.Term,
    d: A.DiffExpr,
    N: A.Term,
    at: A.Type,
    sampler: Sampler | None = None,
    trials: int = DEFAULT_TRIALS,
    *,
    registry=None,
    record: list | None = None,
    fuel: int = E.DEFAULT_FUEL,
) -> Verdict:
    """Check ``delta_at(M, d, N)``.

    ``record``, when given, collects a TrialRecord for every sampled premise.
    """
    sampler = sampler or Sampler()
    reg = resolve(registry)
    if trials < 1:
        raise ValueError("trials must be positive")
    _prepare(M, d, N, at, reg)
    walker = _DlrWalk(sampler, reg, record, fuel)
    dv = diff_eval(d, registry=reg)
    mv = walker.machine.eval(M)
    nv = walker.machine.eval(N)
    inputs = {
        "kind": "dlr", "lhs": print_term(M), "diff": print_diff(d),
        "rhs": print_term(N), "type": print_type(at),
    }
    if not _needs_sampling(at):
        w = walker.walk(mv, dv, nv, at, None, [])
        if w is None:
            return ExactPass(trials=0, seed=None)
        return ExactFail(trials=0, seed=None, witness={**inputs, **w})
    rng = sampler.rng("dlr")
    for i in range(trials):
        walker.fresh_machine()
        w = walker.walk(mv, dv, nv, at, rng, [])
        if w is not None:
            return Counterexample(trials=i + 1, seed=sampler.seed, witness={**inputs, **w})
    return PassSampled(trials=trials, seed=sampler.seed)


def symmetry_swap(
    M: A.Term, d: A.DiffExpr, N: A.Term, at: A.Type,
    sampler: Sampler | None = None, trials: int = DEFAULT_TRIALS, *, registry=None,
    fuel: int = E.DEFAULT_FUEL,
) -> SymmetryResult:
    """Run ``dlr_check`` in both directions with the same seed."""
    forward = dlr_check(M, d, N, at, sampler, trials, registry=registry, fuel=fuel)
    backward = dlr_check(N, d, M, at, sampler, trials, registry=registry, fuel=fuel)
    return SymmetryResult(forward, backward)


# ---------------------------------------------------------------------------
# Null, metric and finite sets
# ---------------------------------------------------------------------------

# A set check at a leaf decides membership of a numeric difference given the
# leaf's parameter; ``descend`` produces the parameter for the codomain.


class _SetWalk:
    def __init__(self, sampler: Sampler, registry, leaf: Callable, premise: Callable, descend: Callable):
        self.sampler = sampler
        self.registry = registry
        self.leaf = leaf
        self.premise = premise
        self.descend = descend

    def walk(self, d: DiffValue, ty: A.Type, param, rng, path: list):
        if isinstance(ty, A.RealT):
            if not isinstance(d, float):
                raise SortError("difference at Real is not a number")
            return None if self.leaf(d, param) else {"path": list(path), "value": d, "param": param}
        if isinstance(ty, A.Prod):
            if not isinstance(d, Tup):
                raise SortError("difference at a product type is not a pair")
            return (
                self.walk(d.left, ty.left, param, rng, path + [{"proj": "fst"}])
                or self.walk(d.right, ty.right, param, rng, path + [{"proj": "snd"}])
            )
        if not isinstance(d, DFun):
            raise SortError("difference at an arrow type is not a function")
        vt, v = self.sampler.point(ty.domain, rng, self.registry)
        y_expr, s = self.premise(ty.domain, rng)
        y = diff_eval(y_expr, registry=self.registry)
        step = {"v": print_term(vt), "y": print_diff(y_expr)}
        return self.walk(d(v, y), ty.codomain, self.descend(param, s), rng, path + [step])


def _set_check(name: str, d, at, sampler, trials, registry, leaf, premise, descend, param, extra=None):
    sampler = sampler or Sampler()
    reg = resolve(registry)
    if trials < 1:
        raise ValueError("trials must be positive")
    check_sort(d, at, registry=reg)
    dv = diff_eval(d, registry=reg)
    walker = _SetWalk(sampler, reg, leaf, premise, descend)
    inputs = {"kind": name, "diff": print_diff(d), "type": print_type(at), **(extra or {})}
    if not _needs_sampling(at):
        w = walker.walk(dv, at, param, None, [])
        if w is None:
            return ExactPass(trials=0, seed=None)
        return ExactFail(trials=0, seed=None, witness={**inputs, **w})
    rng = sampler.rng(name)
    for i in range(trials):
        w = walker.walk(dv, at, param, rng, [])
        if w is not None:
            return Counterexample(trials=i + 1, seed=sampler.seed, witness={**inputs, **w})
    return PassSampled(trials=trials, seed=sampler.seed)


def null_check(d, at, sampler=None, trials=DEFAULT_TRIALS, *, registry=None) -> Verdict:
    """Is ``d`` in the null set of ``at``?"""
    s = sampler or Sampler()
    return _set_check(
        "null", d, at, s, trials, registry,
        leaf=lambda x, _: x == 0.0,
        premise=lambda ty, rng: (s.null_expr(ty, rng), None),
        descend=lambda p, _: None,
        param=None,
    )


def metric_check(d, at, r: float, sampler=None, trials=DEFAULT_TRIALS, *, registry=None) -> Verdict:
    """Is ``d`` in the metric set of ``at`` at parameter ``r``?"""
    s = sampler or Sampler()
    r = float(r)
    if math.isnan(r) or r < 0:
        raise SortError("metric parameter must be a nonnegative number")

    def premise(ty, rng):
        t = s.eps(rng)
        return metric_elem(ty, t), t

    return _set_check(
        "metric", d, at, s, trials, registry,
        leaf=lambda x, p: x == p,
        premise=premise,
        descend=add_up,
        param=r,
        extra={"r": r},
    )


def finite_check(d, at, sampler=None, trials=DEFAULT_TRIALS, *, registry=None) -> Verdict:
    """Is ``d`` in the finite-distance set of ``at``?"""
    s = sampler or Sampler()
    return _set_check(
        "finite", d, at, s, trials, registry,
        leaf=lambda x, _: x < INF,
        premise=lambda ty, rng: (s.diff_expr(ty, rng, finite=True), None),
        descend=lambda p, _: None,
        param=None,
    )


def weakly_bounded(t: A.Term, *, registry=None) -> bool:
    """True when every primitive occurring in ``t`` is weakly bounded."""
    reg = resolve(registry)
    return all(reg[p].weak_bounded for p in A.prim_names(t))


# ---------------------------------------------------------------------------
# Order
# ---------------------------------------------------------------------------


def leq_check(d1, d2, at, sampler=None, trials=DEFAULT_TRIALS, *, registry=None) -> Verdict:
    """Check ``d1 <= d2`` in the difference space of ``at``."""
    sampler = sampler or Sampler()
    reg = resolve(registry)
    if trials < 1:
        raise ValueError("trials must be positive")
    check_sort(d1, at, registry=reg)
    check_sort(d2, at, registry=reg)
    a, b = diff_eval(d1, registry=reg), diff_eval(d2, registry=reg)
    inputs = {"kind": "leq", "lhs": print_diff(d1), "rhs": print_diff(d2), "type": print_type(at)}

    def walk(x, y, ty, rng, path):
        if isinstance(ty, A.RealT):
            if not (isinstance(x, float) and isinstance(y, float)):
                raise SortError("difference at Real is not a number")
            return None if x <= y else {"path": list(path), "lhs_value": x, "rhs_value": y}
        if isinstance(ty, A.Prod):
            return (
                walk(x.left, y.left, ty.left, rng, path + [{"proj": "fst"}])
                or walk(x.right, y.right, ty.right, rng, path + [{"proj": "snd"}])
            )
        vt, v = sampler.point(ty.domain, rng, reg)
        y_expr = sampler.diff_expr(ty.domain, rng)
        e = diff_eval(y_expr, registry=reg)
        step = {"v": print_term(vt), "y": print_diff(y_expr)}
        return walk(x(v, e), y(v, e), ty.codomain, rng, path + [step])

    if not _needs_sampling(at):
        w = walk(a, b, at, None, [])
        return ExactPass() if w is None else ExactFail(witness={**inputs, **w})
    rng = sampler.rng("leq")
    for i in range(trials):
        w = walk(a, b, at, rng, [])
        if w is not None:
            return Counterexample(trials=i + 1, seed=sampler.seed, witness={**inputs, **w})
    return PassSampled(trials=trials, seed=sampler.seed)


# ---------------------------------------------------------------------------
# Witness replay
# ---------------------------------------------------------------------------


def recheck(witness: dict, *, registry=None) -> bool:
    """Re-evaluate a witness without sampling; True when it still shows a violation."""
    reg = resolve(registry)
    ty = parse_type(witness["type"])
    kind = witness["kind"]
    if kind == "dlr":
        return _recheck_dlr(witness, ty, reg)
    if kind == "leq":
        a = diff_eval(parse_diff(witness["lhs"], ty, registry=reg), registry=reg)
        b = diff_eval(parse_diff(witness["rhs"], ty, registry=reg), registry=reg)
        x, y = a, b
        for step, cur in _follow(witness["path"], ty):
            if "proj" in step:
                x, y = (x.left, y.left) if step["proj"] == "fst" else (x.right, y.right)
            else:
                v, e = _replay_point(step, cur, reg)
                x, y = x(v, e), y(v, e)
        return not x <= y
    d = diff_eval(parse_diff(witness["diff"], ty, registry=reg), registry=reg)
    param = witness.get("r")
    for step, cur in _follow(witness["path"], ty):
        if "proj" in step:
            d = d.left if step["proj"] == "fst" else d.right
        else:
            v, e = _replay_point(step, cur, reg)
            if kind == "metric":
                from .sampling import metric_param
                s = diff_eval(metric_param(cur.domain, parse_diff(step["y"], cur.domain, registry=reg)), registry=reg)
                param = add_up(param, s)
            d = d(v, e)
    if kind == "null":
        return d != 0.0
    if kind == "metric":
        return d != param
    if kind == "finite":
        return d == INF
    raise StlrError(f"unknown witness kind {kind!r}")


def _follow(path: list, ty: A.Type):
    """Pair each path step with the type it is taken at."""
    cur = ty
    for step in path:
        yield step, cur
        if "proj" in step:
            cur = cur.left if step["proj"] == "fst" else cur.right
        else:
            cur = cur.codomain


def _replay_point(step: dict, cur: A.Arrow, reg):
    v = E.value_of(parse_term(step["v"], registry=reg), registry=reg)
    e = diff_eval(parse_diff(step["y"], cur.domain, registry=reg), registry=reg)
    return v, e


def _recheck_dlr(witness: dict, ty: A.Type, reg) -> bool:
    M = parse_term(witness["lhs"], registry=reg)
    N = parse_term(witness["rhs"], registry=reg)
    d = diff_eval(parse_diff(witness["diff"], ty, registry=reg), registry=reg)
    m = E.Machine(E.DEFAULT_FUEL, reg)
    mv, nv = m.eval(M), m.eval(N)
    for step, cur in _follow(witness["path"], ty):
        if "proj" in step:
            sel = "left" if step["proj"] == "fst" else "right"
            mv = m.eval(getattr(mv, sel), mv.env)
            nv = m.eval(getattr(nv, sel), nv.env)
            d = d.left if sel == "left" else d.right
            continue
        v = m.eval(parse_term(step["v"], registry=reg))
        w = m.eval(parse_term(step["w"], registry=reg))
        y = diff_eval(parse_diff(step["y"], cur.domain, registry=reg), registry=reg)
        d = d(v, y)
        if step["swapped"]:
            mv, nv = m.apply(mv, w), m.apply(nv, v)
        else:
            mv, nv = m.apply(mv, v), m.apply(nv, w)
    return not real_distance_within(mv, nv, d)
