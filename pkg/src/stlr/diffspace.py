"""Difference spaces: values, evaluation of difference expressions, order and
quantale structure.

At ``Real`` a difference is a float in ``[0, inf]``; at ``T -> U`` it is a
function of a point (a runtime value of type ``T``) and a difference at ``T``;
at ``T * U`` it is a pair.  Multiplication is addition lifted pointwise, with
sums rounded upward so that computed bounds never undershoot the real sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence, Union

from . import evaluation as E
from .errors import SortError, StlrError
from .interval import INF, Interval, add_up, sub_down
from .prims import prim_diameter, resolve
from .syntax import ast as A
from .syntax.printer import print_type

# ---------------------------------------------------------------------------
# Values
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DFun:
    fn: Callable[[E.Value, "DiffValue"], "DiffValue"]
    label: str = "<fun>"

    def __call__(self, point: E.Value, diff: "DiffValue") -> "DiffValue":
        return self.fn(point, diff)

    def __repr__(self):
        return f"DFun({self.label})"


@dataclass(frozen=True)
class Tup:
    left: "DiffValue"
    right: "DiffValue"


DiffValue = Union[float, DFun, Tup]


def num(x: float) -> float:
    """Validate a difference at Real."""
    x = float(x)
    if math.isnan(x):
        raise SortError("nan is not a difference")
    if x < 0:
        raise SortError(f"negative difference {x!r}")
    return x


def dv_mult(a: DiffValue, b: DiffValue) -> DiffValue:
    if isinstance(a, float) and isinstance(b, float):
        return add_up(a, b)
    if isinstance(a, Tup) and isinstance(b, Tup):
        return Tup(dv_mult(a.left, b.left), dv_mult(a.right, b.right))
    if isinstance(a, DFun) and isinstance(b, DFun):
        return DFun(lambda v, y: dv_mult(a(v, y), b(v, y)), f"({a.label} * {b.label})")
    raise SortError("multiplying differences of different sorts")


def dv_sup(values: Sequence[DiffValue], at: A.Type | None = None) -> DiffValue:
    """Pointwise supremum; the empty supremum needs ``at`` unless it is Real."""
    values = list(values)
    if not values:
        return bottom_value(at if at is not None else A.Real)
    first = values[0]
    if isinstance(first, float):
        if not all(isinstance(v, float) for v in values):
            raise SortError("supremum of differences of different sorts")
        return max(values)
    if isinstance(first, Tup):
        if not all(isinstance(v, Tup) for v in values):
            raise SortError("supremum of differences of different sorts")
        return Tup(dv_sup([v.left for v in values]), dv_sup([v.right for v in values]))
    if not all(isinstance(v, DFun) for v in values):
        raise SortError("supremum of differences of different sorts")
    return DFun(lambda p, y: dv_sup([f(p, y) for f in values]), "sup")


def _const_value(ty: A.Type, leaf: float) -> DiffValue:
    if isinstance(ty, A.RealT):
        return leaf
    if isinstance(ty, A.Prod):
        return Tup(_const_value(ty.left, leaf), _const_value(ty.right, leaf))
    out = _const_value(ty.codomain, leaf)
    return DFun(lambda p, y: out, f"const {leaf!r}")


def unit_value(ty: A.Type) -> DiffValue:
    return _const_value(ty, 0.0)


def bottom_value(ty: A.Type) -> DiffValue:
    return _const_value(ty, 0.0)


def top_value(ty: A.Type) -> DiffValue:
    return _const_value(ty, INF)


def check_value_sort(v: DiffValue, ty: A.Type) -> None:
    """Shallow sort check of a value (function bodies are checked when called)."""
    if isinstance(ty, A.RealT):
        if not isinstance(v, float):
            raise SortError(f"expected a number, got {v!r}")
        num(v)
    elif isinstance(ty, A.Prod):
        if not isinstance(v, Tup):
            raise SortError(f"expected a pair of differences, got {v!r}")
        check_value_sort(v.left, ty.left)
        check_value_sort(v.right, ty.right)
    elif not isinstance(v, DFun):
        raise SortError(f"expected a difference function, got {v!r}")


# ---------------------------------------------------------------------------
# Exact comparison of reals against a bound
# ---------------------------------------------------------------------------


def real_distance_within(a: float, b: float, bound: float) -> bool:
    """Is ``|a - b| <= bound`` in exact real arithmetic?

    Equal infinities are at distance 0; nan is at no finite or infinite
    distance from anything.
    """
    if math.isnan(a) or math.isnan(b) or math.isnan(bound):
        return False
    if a == b:
        return True
    if math.isinf(a) or math.isinf(b):
        return bound == INF
    if bound == INF:
        return True
    return abs(Fraction(a) - Fraction(b)) <= Fraction(bound)


def real_distance(a: float, b: float) -> float:
    """``|a - b|`` rounded up (inf for different infinities, nan for nan)."""
    if math.isnan(a) or math.isnan(b):
        return math.nan
    if a == b:
        return 0.0
    if math.isinf(a) or math.isinf(b):
        return INF
    hi, lo = (a, b) if a > b else (b, a)
    return max(0.0, -sub_down(lo, hi))


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

PointEnv = Mapping[str, E.Value]
DiffEnv = Mapping[str, DiffValue]

ITER_COUNT_CAP = 10**6


def apply_reals(m: E.Machine, f: E.Value, args: Sequence[float]) -> E.Value:
    """Apply a first-order function value to reals, tupling where its domain asks."""
    args = list(args)
    while args:
        if isinstance(f, A.Prim):
            n = f.arity
        elif isinstance(f, E.Closure):
            n = _power_arity(f.annot)
        else:
            n = 1
        if len(args) < n:
            raise SortError("too few arguments for a function point")
        chunk, args = args[:n], args[n:]
        f = m.apply(f, _tuple_value(chunk))
    return f


def _power_arity(ty: A.Type) -> int:
    n = 1
    while isinstance(ty, A.Prod):
        n += 1
        ty = ty.left
    return n


def _tuple_value(xs: Sequence[float]) -> E.Value:
    if len(xs) == 1:
        return float(xs[0])
    term = A.tuple_term([A.Lit(float(x)) for x in xs])
    return E.PairV(term.left, term.right, {})


def gather_reals(m: E.Machine, v: E.Value, n: int) -> tuple[float, ...]:
    """Flatten a left-nested tuple value of ``n`` reals."""
    if n == 1:
        if not isinstance(v, float):
            raise SortError("expected a real point")
        return (v,)
    if not isinstance(v, E.PairV):
        raise SortError("expected a tuple point")
    left = gather_reals(m, m.eval(v.left, v.env), n - 1)
    right = m.eval(v.right, v.env)
    if not isinstance(right, float):
        raise SortError("expected a real component")
    return left + (right,)


def flatten_diff(v: DiffValue, n: int) -> tuple[float, ...]:
    if n == 1:
        if not isinstance(v, float):
            raise SortError("expected a numeric difference")
        return (v,)
    if not isinstance(v, Tup):
        raise SortError("expected a tuple difference")
    return flatten_diff(v.left, n - 1) + flatten_diff(v.right, 1)


def iteration_count(r: float, cap: int = ITER_COUNT_CAP) -> int | None:
    """How many times ``iter`` unfolds at ``r``; None past ``cap`` or for nan."""
    if math.isnan(r):
        return None
    n = 0
    while r >= 0:
        n += 1
        if n > cap:
            return None
        r = r - 1.0
    return n


class DiffEvaluator:
    def __init__(self, registry=None, fuel: int = E.DEFAULT_FUEL):
        self.registry = resolve(registry)
        self.fuel = fuel

    def machine(self) -> E.Machine:
        return E.Machine(self.fuel, self.registry)

    # -- point expressions -------------------------------------------------

    def point(self, r: A.RealExpr, penv: PointEnv, denv: DiffEnv) -> E.Value:
        if isinstance(r, A.RLit):
            return float(r.value)
        if isinstance(r, A.RPoint):
            try:
                return penv[r.name]
            except KeyError:
                raise SortError(f"unbound point variable {r.name!r}") from None
        if isinstance(r, A.RDiff):
            v = denv.get(r.name)
            if not isinstance(v, float):
                raise SortError(f"{r.name!r} is not a numeric difference")
            return v
        if isinstance(r, A.PrimApp):
            args = [self.real(a, penv, denv) for a in r.args]
            return self.machine().call_prim(r.prim, tuple(args))
        if isinstance(r, A.TermPoint):
            return self.machine().eval(r.term, penv)
        if isinstance(r, A.SemApp):
            m = self.machine()
            f = m.eval(r.term, penv)
            return apply_reals(m, f, [self.real(a, penv, denv) for a in r.args])
        if isinstance(r, A.PointApp):
            f = self.point(A.RPoint(r.name), penv, denv)
            return apply_reals(self.machine(), f, [self.real(a, penv, denv) for a in r.args])
        if isinstance(r, A.Neg):
            return -self.real(r.arg, penv, denv)
        if isinstance(r, A.Arith):
            a = self.real(r.left, penv, denv)
            b = self.real(r.right, penv, denv)
            if r.op == "+":
                return a + b
            if r.op == "-":
                return a - b
            if r.op == "*":
                return a * b
            return a / b if b != 0 else math.nan
        raise SortError(f"not a point expression: {r!r}")

    def real(self, r: A.RealExpr, penv: PointEnv, denv: DiffEnv) -> float:
        v = self.point(r, penv, denv)
        if not isinstance(v, float):
            raise SortError("expected a real-valued point expression")
        return v

    def enclose(self, r: A.RealExpr, penv: PointEnv, denv: DiffEnv) -> Interval:
        """Interval containing the exact value of ``r``.

        Points, differences and values computed by program evaluation are
        taken as exact; primitive calls and arithmetic are enclosed.
        """
        if isinstance(r, A.PrimApp):
            box = [self.enclose(a, penv, denv) for a in r.args]
            return self.registry[r.prim].enclose(box)
        if isinstance(r, A.Neg):
            return -self.enclose(r.arg, penv, denv)
        if isinstance(r, A.Arith):
            a = self.enclose(r.left, penv, denv)
            b = self.enclose(r.right, penv, denv)
            if r.op == "+":
                return a + b
            if r.op == "-":
                return a - b
            if r.op == "*":
                return a * b
            return a / b
        v = self.real(r, penv, denv)
        if math.isnan(v):
            raise SortError("point expression evaluated to nan")
        return Interval.point(v)

    # -- differences -------------------------------------------------------

    def eval(self, d: A.DiffExpr, penv: PointEnv, denv: DiffEnv) -> DiffValue:
        if isinstance(d, A.Const):
            return num(d.value)
        if isinstance(d, A.Infinity):
            return INF
        if isinstance(d, A.DiffVar):
            try:
                return denv[d.name]
            except KeyError:
                raise SortError(f"unbound difference variable {d.name!r}") from None
        if isinstance(d, A.PointVar):
            v = penv.get(d.name)
            if not isinstance(v, float):
                raise SortError(f"point {d.name!r} is not a real")
            return num(v)
        if isinstance(d, A.Add):
            a = self.eval(d.left, penv, denv)
            b = self.eval(d.right, penv, denv)
            if not (isinstance(a, float) and isinstance(b, float)):
                raise SortError("'+' applies to numeric differences")
            return add_up(a, b)
        if isinstance(d, A.AbsReal):
            return num(abs(self.enclose(d.expr, penv, denv)).hi)
        if isinstance(d, A.Scalar):
            iv = self.enclose(d.expr, penv, denv)
            if iv.lo < 0:
                raise SortError(f"difference expression may be negative: {iv!r}")
            return num(iv.hi)
        if isinstance(d, A.DLam):
            return self._closure(d, penv, denv)
        if isinstance(d, A.DApp):
            f = self.eval(d.fun, penv, denv)
            if not isinstance(f, DFun):
                raise SortError("'@' applied to a non-function difference")
            return f(self.point(d.point, penv, denv), self.eval(d.diff, penv, denv))
        if isinstance(d, A.DPair):
            return Tup(self.eval(d.left, penv, denv), self.eval(d.right, penv, denv))
        if isinstance(d, (A.DFst, A.DSnd)):
            v = self.eval(d.arg, penv, denv)
            if not isinstance(v, Tup):
                raise SortError("projection of a non-pair difference")
            return v.left if isinstance(d, A.DFst) else v.right
        if isinstance(d, A.FinSup):
            return dv_sup([self.eval(i, penv, denv) for i in d.items])
        if isinstance(d, A.PrimDiam):
            spec = self.registry[d.prim]
            m = self.machine()
            center = gather_reals(m, self.point(d.center, penv, denv), spec.arity)
            radius = flatten_diff(self.eval(d.radius, penv, denv), spec.arity)
            return prim_diameter(spec, center, radius)
        if isinstance(d, A.IfzDiff):
            c = self.real(d.center, penv, denv)
            r = self.eval(d.radius, penv, denv)
            if not isinstance(r, float):
                raise SortError("ifzd radius must be numeric")
            if r < INF and not math.isnan(c):
                if add_up(c, r) < 0:
                    return self.eval(d.neg, penv, denv)
                if sub_down(c, r) >= 0:
                    return self.eval(d.nonneg, penv, denv)
            return self.eval(d.top, penv, denv)
        if isinstance(d, A.IterDiff):
            return self._iter_diff(d, penv, denv)
        raise SortError(f"not a difference expression: {d!r}")

    def _closure(self, d: A.DLam, penv: PointEnv, denv: DiffEnv) -> DFun:
        penv0 = {k: v for k, v in penv.items() if k != d.diff}
        denv0 = {k: v for k, v in denv.items() if k != d.point}

        def fn(point, diff):
            return self.eval(d.body, {**penv0, d.point: point}, {**denv0, d.diff: diff})

        return DFun(fn, f"dlam ({d.point}, {d.diff})")

    def _iter_diff(self, d: A.IterDiff, penv: PointEnv, denv: DiffEnv) -> DiffValue:
        c = self.real(d.center, penv, denv)
        r = self.eval(d.radius, penv, denv)
        if not isinstance(r, float):
            raise SortError("iterd radius must be numeric")
        if r == INF or math.isnan(c):
            return self.eval(d.top, penv, denv)
        n_lo = iteration_count(sub_down(c, r))
        n_hi = iteration_count(add_up(c, r))
        if n_lo is None or n_lo != n_hi:
            return self.eval(d.top, penv, denv)
        m = self.machine()
        value = m.eval(d.base, penv)
        diff = self.eval(d.base_diff, penv, denv)
        if n_lo == 0:
            return diff
        step = m.eval(d.step, penv)
        step_diff = self.eval(d.step_diff, penv, denv)
        if not isinstance(step_diff, DFun):
            raise SortError("iterd step difference must be a function")
        for _ in range(n_lo):
            diff = step_diff(value, diff)
            value = m.apply(step, value)
        return diff


def diff_eval(
    d: A.DiffExpr,
    point_env: PointEnv | None = None,
    diff_env: DiffEnv | None = None,
    *,
    registry=None,
) -> DiffValue:
    return DiffEvaluator(registry).eval(d, point_env or {}, diff_env or {})


# ---------------------------------------------------------------------------
# Sort checking of programmatically built expressions
# ---------------------------------------------------------------------------


def check_sort(
    d: A.DiffExpr,
    at: A.Type,
    point_env: Mapping[str, A.Type] | None = None,
    diff_env: Mapping[str, A.Type] | None = None,
    *,
    registry=None,
) -> None:
    """Raise SortError unless ``d`` lives in the difference space of ``at``."""
    _Sorter(resolve(registry)).check(d, at, dict(point_env or {}), dict(diff_env or {}))


class _Sorter:
    def __init__(self, registry):
        self.registry = registry

    def term_type(self, t: A.Term, penv) -> A.Type:
        from .typecheck import infer
        try:
            return infer(penv, t, registry=self.registry)
        except StlrError as exc:
            raise SortError(f"ill-typed embedded term: {exc}") from None

    def real(self, r: A.RealExpr, penv, denv) -> None:
        self.point(r, A.Real, penv, denv)

    def point(self, r: A.RealExpr, ty: A.Type, penv, denv) -> None:
        if isinstance(r, A.RPoint):
            if penv.get(r.name) != ty:
                raise SortError(f"point {r.name!r} is not of type {print_type(ty)}")
            return
        if isinstance(r, A.TermPoint):
            if self.term_type(r.term, penv) != ty:
                raise SortError(f"embedded term is not of type {print_type(ty)}")
            return
        if ty != A.Real:
            raise SortError(f"expected a point of type {print_type(ty)}")
        if isinstance(r, A.RLit):
            return
        if isinstance(r, A.RDiff):
            if denv.get(r.name) != A.Real:
                raise SortError(f"{r.name!r} is not a numeric difference")
            return
        if isinstance(r, (A.Neg,)):
            self.real(r.arg, penv, denv)
            return
        if isinstance(r, A.Arith):
            self.real(r.left, penv, denv)
            self.real(r.right, penv, denv)
            return
        if isinstance(r, A.PrimApp):
            if self.registry[r.prim].arity != len(r.args):
                raise SortError(f"wrong number of arguments to {r.prim!r}")
            for a in r.args:
                self.real(a, penv, denv)
            return
        if isinstance(r, (A.SemApp, A.PointApp)):
            for a in r.args:
                self.real(a, penv, denv)
            if isinstance(r, A.SemApp):
                self.term_type(r.term, penv)
            elif r.name not in penv:
                raise SortError(f"unbound point function {r.name!r}")
            return
        raise SortError(f"not a point expression: {r!r}")

    def synth(self, d: A.DiffExpr, penv, denv) -> A.Type | None:
        if isinstance(d, (A.Const, A.Infinity, A.PointVar, A.Add, A.AbsReal, A.Scalar, A.PrimDiam)):
            self.check(d, A.Real, penv, denv)
            return A.Real
        if isinstance(d, A.DiffVar):
            if d.name not in denv:
                raise SortError(f"unbound difference variable {d.name!r}")
            return denv[d.name]
        if isinstance(d, A.DPair):
            l = self.synth(d.left, penv, denv)
            r = self.synth(d.right, penv, denv)
            return A.Prod(l, r) if l is not None and r is not None else None
        if isinstance(d, (A.DFst, A.DSnd)):
            s = self.synth(d.arg, penv, denv)
            if s is None:
                return None
            if not isinstance(s, A.Prod):
                raise SortError("projection of a non-pair difference")
            return s.left if isinstance(d, A.DFst) else s.right
        if isinstance(d, A.DApp):
            f = self.synth(d.fun, penv, denv)
            if f is not None:
                if not isinstance(f, A.Arrow):
                    raise SortError("'@' applied to a non-function difference")
                self.point(d.point, f.domain, penv, denv)
                self.check(d.diff, f.domain, penv, denv)
                return f.codomain
            return None
        if isinstance(d, A.FinSup):
            for i in d.items:
                s = self.synth(i, penv, denv)
                if s is not None:
                    for j in d.items:
                        self.check(j, s, penv, denv)
                    return s
            return None
        return None

    def check(self, d: A.DiffExpr, at: A.Type, penv, denv) -> None:
        real_only = (A.Const, A.Infinity, A.PointVar, A.Add, A.AbsReal, A.Scalar, A.PrimDiam)
        if isinstance(d, real_only):
            if at != A.Real:
                raise SortError(f"a number where {print_type(at)} was expected")
            if isinstance(d, A.Const):
                num(d.value)
            elif isinstance(d, A.PointVar):
                if penv.get(d.name) != A.Real:
                    raise SortError(f"point {d.name!r} is not real")
            elif isinstance(d, A.Add):
                self.check(d.left, A.Real, penv, denv)
                self.check(d.right, A.Real, penv, denv)
            elif isinstance(d, (A.AbsReal, A.Scalar)):
                self.real(d.expr, penv, denv)
            elif isinstance(d, A.PrimDiam):
                dom = A.real_power(self.registry[d.prim].arity)
                self.point(d.center, dom, penv, denv)
                self.check(d.radius, dom, penv, denv)
            return
        if isinstance(d, A.DLam):
            if not isinstance(at, A.Arrow):
                raise SortError(f"a difference function where {print_type(at)} was expected")
            penv2 = {k: v for k, v in penv.items() if k != d.diff}
            penv2[d.point] = at.domain
            denv2 = {k: v for k, v in denv.items() if k != d.point}
            denv2[d.diff] = at.domain
            self.check(d.body, at.codomain, penv2, denv2)
            return
        if isinstance(d, A.DPair):
            if not isinstance(at, A.Prod):
                raise SortError(f"a pair where {print_type(at)} was expected")
            self.check(d.left, at.left, penv, denv)
            self.check(d.right, at.right, penv, denv)
            return
        if isinstance(d, A.FinSup):
            for i in d.items:
                self.check(i, at, penv, denv)
            if not d.items and at != A.Real:
                raise SortError("an empty sup{} denotes 0 and lives at Real")
            return
        if isinstance(d, A.IfzDiff):
            self.real(d.center, penv, denv)
            self.check(d.radius, A.Real, penv, denv)
            for part in (d.neg, d.nonneg, d.top):
                self.check(part, at, penv, denv)
            return
        if isinstance(d, A.IterDiff):
            self.real(d.center, penv, denv)
            self.check(d.radius, A.Real, penv, denv)
            if self.term_type(d.step, penv) != A.Arrow(at, at):
                raise SortError("iterd step has the wrong type")
            if self.term_type(d.base, penv) != at:
                raise SortError("iterd base has the wrong type")
            self.check(d.step_diff, A.Arrow(at, at), penv, denv)
            self.check(d.base_diff, at, penv, denv)
            self.check(d.top, at, penv, denv)
            return
        if isinstance(d, A.DApp):
            f = self.synth(d.fun, penv, denv)
            if f is None:
                dom = self.synth(d.diff, penv, denv)
                if dom is None and isinstance(d.point, A.TermPoint):
                    dom = self.term_type(d.point.term, penv)
                if dom is None:
                    raise SortError("cannot determine the sort of a difference application")
                f = A.Arrow(dom, at)
                self.check(d.fun, f, penv, denv)
            if not isinstance(f, A.Arrow) or f.codomain != at:
                raise SortError(f"application has the wrong sort for {print_type(at)}")
            self.point(d.point, f.domain, penv, denv)
            self.check(d.diff, f.domain, penv, denv)
            return
        s = self.synth(d, penv, denv)
        if s is not None and s != at:
            raise SortError(f"expected {print_type(at)}, found {print_type(s)}")


# ---------------------------------------------------------------------------
# Symbolic operations
# ---------------------------------------------------------------------------


def _fresh_pair(avoid: set[str]) -> tuple[str, str]:
    x = A.fresh_name("x", avoid)
    e = A.fresh_name("e", avoid | {x})
    avoid |= {x, e}
    return x, e


def _names(ds: Iterable[A.DiffExpr]) -> set[str]:
    out: set[str] = set()
    for d in ds:
        out |= A.diff_names(d)
    return out


def quantale_unit(at: A.Type) -> A.DiffExpr:
    return _const_expr(at, A.Const(0.0), set())


def bottom_expr(at: A.Type) -> A.DiffExpr:
    return _const_expr(at, A.Const(0.0), set())


def top_expr(at: A.Type) -> A.DiffExpr:
    return _const_expr(at, A.Infinity(), set())


def _const_expr(at: A.Type, leaf: A.DiffExpr, avoid: set[str]) -> A.DiffExpr:
    if isinstance(at, A.RealT):
        return leaf
    if isinstance(at, A.Prod):
        return A.DPair(_const_expr(at.left, leaf, avoid), _const_expr(at.right, leaf, avoid))
    x, e = _fresh_pair(avoid)
    return A.DLam(x, e, _const_expr(at.codomain, leaf, avoid))


def quantale_mult(d1: A.DiffExpr, d2: A.DiffExpr, at: A.Type) -> A.DiffExpr:
    return _pointwise(lambda items: A.Add(items[0], items[1]), [d1, d2], at, _names([d1, d2]))


def finite_sup(ds: Sequence[A.DiffExpr], at: A.Type) -> A.DiffExpr:
    ds = list(ds)
    if not ds:
        return bottom_expr(at)
    return _pointwise(lambda items: A.FinSup(tuple(items)), ds, at, _names(ds))


def _pointwise(combine, ds: list, at: A.Type, avoid: set[str]) -> A.DiffExpr:
    if isinstance(at, A.RealT):
        return combine(ds)
    if isinstance(at, A.Prod):
        return A.DPair(
            _pointwise(combine, [A.DFst(d) for d in ds], at.left, avoid),
            _pointwise(combine, [A.DSnd(d) for d in ds], at.right, avoid),
        )
    x, e = _fresh_pair(avoid)
    applied = [A.DApp(d, A.RPoint(x), A.DiffVar(e)) for d in ds]
    return A.DLam(x, e, _pointwise(combine, applied, at.codomain, avoid))
