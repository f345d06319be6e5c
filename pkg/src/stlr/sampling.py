"""Seeded generators for points, differences, premises and whole programs.

Everything random flows from a ``Sampler`` (an immutable configuration) and a
``random.Random`` stream derived from its seed, so a seed reproduces a run.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Sequence

from . import evaluation as E
from .diffspace import DiffValue, Tup, diff_eval, real_distance, real_distance_within
from .errors import GeneratorExhausted
from .interval import INF, add_up
from .prims import resolve
from .syntax import ast as A

SPECIAL_POINTS = (0.0, 1.0, -1.0, math.pi, -math.pi, 1e-9, -1e-9, 1e9, -1e9)


@dataclass(frozen=True)
class Sampler:
    seed: int = 0
    real_range: tuple[float, float] = (-10.0, 10.0)
    special_points: tuple[float, ...] = SPECIAL_POINTS
    special_prob: float = 0.1
    eps_range: tuple[float, float] = (0.0, 5.0)
    inf_prob: float = 0.02
    slack: float = 0.0
    depth: int = 2
    term_depth: int = 2
    prims: tuple[str, ...] = ("sin", "add1", "pred", "mul2")

    def __post_init__(self):
        lo, hi = self.real_range
        if not lo < hi:
            raise ValueError("real range must satisfy lo < hi")
        if not 0 <= self.eps_range[0] <= self.eps_range[1]:
            raise ValueError("difference range must be a nonnegative interval")

    def rng(self, stream: str | int = 0) -> random.Random:
        return random.Random(f"{self.seed}:{stream}")

    # -- reals -------------------------------------------------------------

    def real(self, rng: random.Random) -> float:
        if self.special_points and rng.random() < self.special_prob:
            return rng.choice(self.special_points)
        return rng.uniform(*self.real_range)

    def eps(self, rng: random.Random, finite: bool = False) -> float:
        u = rng.random()
        if not finite and u < self.inf_prob:
            return INF
        if u < self.inf_prob + 0.05:
            return 0.0
        return rng.uniform(*self.eps_range)

    def real_premise(self, rng: random.Random) -> tuple[float, float, float]:
        """``(V, y, W)`` with ``|V - W| <= y`` exactly."""
        v = self.real(rng)
        e = self.eps(rng)
        if e == INF:
            return v, INF, self.real(rng)
        mode = rng.random()
        if mode < 0.1:
            w = v
        elif mode < 0.3:
            w = v + e if rng.random() < 0.5 else v - e
        else:
            w = v + rng.uniform(-1.0, 1.0) * e
        y = add_up(e, self.slack) if self.slack else e
        if not real_distance_within(v, w, y):
            y = real_distance(v, w)
        return v, y, w

    # -- premises and points ----------------------------------------------

    def point(self, ty: A.Type, rng: random.Random, registry=None) -> tuple[A.Term, E.Value]:
        """A closed value of type ``ty``, as a term and as a runtime value."""
        if isinstance(ty, A.RealT):
            x = self.real(rng)
            return A.Lit(x), x
        if isinstance(ty, A.Prod):
            lt, _ = self.point(ty.left, rng, registry)
            rt, _ = self.point(ty.right, rng, registry)
            return A.Pair(lt, rt), E.PairV(lt, rt, {})
        if A.type_order(ty) > self.depth:
            raise GeneratorExhausted(
                f"premises of order {A.type_order(ty)} exceed the generator depth {self.depth}"
            )
        gen = TermGenerator(rng, self.prims, registry=registry, iter_bound=5)
        t = gen.closed(ty, self.term_depth)
        v = E.value_of(t, registry=registry)
        return E.readback(v), v

    def premise(self, ty: A.Type, rng: random.Random, registry=None) -> "Premise":
        """A triple ``(V, y, W)`` related at ``ty`` by construction.

        At higher types ``W`` is ``V`` itself and ``y`` its derived
        self-distance, so distinct higher-order arguments are never tried.
        """
        if isinstance(ty, A.RealT):
            v, y, w = self.real_premise(rng)
            return Premise(A.Lit(v), v, y, _num_expr(y), A.Lit(w), w)
        if isinstance(ty, A.Prod):
            l = self.premise(ty.left, rng, registry)
            r = self.premise(ty.right, rng, registry)
            vt, wt = A.Pair(l.v_term, r.v_term), A.Pair(l.w_term, r.w_term)
            return Premise(
                vt, E.PairV(vt.left, vt.right, {}),
                Tup(l.y, r.y), A.DPair(l.y_expr, r.y_expr),
                wt, E.PairV(wt.left, wt.right, {}),
            )
        from .sensitivity import derive_self_distance
        vt, v = self.point(ty, rng, registry)
        dexpr = derive_self_distance({}, vt, registry=registry).expr
        y = diff_eval(dexpr, registry=registry)
        return Premise(vt, v, y, dexpr, vt, v)

    # -- differences -------------------------------------------------------

    def diff_expr(self, ty: A.Type, rng: random.Random, finite: bool = False) -> A.DiffExpr:
        """A random element of the difference space of ``ty`` as an expression."""
        return _random_diff(self, ty, rng, finite, set())

    def null_expr(self, ty: A.Type, rng: random.Random) -> A.DiffExpr:
        """A random element of the null set of ``ty``."""
        return _null_diff(ty, rng, set())


@dataclass(frozen=True)
class Premise:
    v_term: A.Term
    v: E.Value
    y: DiffValue
    y_expr: A.DiffExpr
    w_term: A.Term
    w: E.Value


def _num_expr(x: float) -> A.DiffExpr:
    return A.Infinity() if x == INF else A.Const(x)


def _fresh(avoid: set[str], base: str) -> str:
    name = A.fresh_name(base, avoid)
    avoid.add(name)
    return name


def _random_diff(s: Sampler, ty: A.Type, rng: random.Random, finite: bool, avoid: set[str]):
    if isinstance(ty, A.RealT):
        return _num_expr(s.eps(rng, finite))
    if isinstance(ty, A.Prod):
        return A.DPair(
            _random_diff(s, ty.left, rng, finite, avoid),
            _random_diff(s, ty.right, rng, finite, avoid),
        )
    x, e = _fresh(avoid, "x"), _fresh(avoid, "e")
    if ty.codomain == A.Real:
        c = _num_expr(s.eps(rng, finite))
        k = rng.uniform(0.0, 3.0)
        choice = rng.randrange(4) if ty.domain == A.Real else 0
        if choice == 1:
            body = A.Add(c, A.DiffVar(e))
        elif choice == 2:
            body = A.Add(c, A.Scalar(A.Arith("*", A.RLit(k), A.RDiff(e))))
        elif choice == 3:
            body = A.Add(c, A.AbsReal(A.Arith("*", A.RLit(k), A.RPoint(x))))
        else:
            body = c
    else:
        body = _random_diff(s, ty.codomain, rng, finite, avoid)
    return A.DLam(x, e, body)


def _null_diff(ty: A.Type, rng: random.Random, avoid: set[str]):
    if isinstance(ty, A.RealT):
        return A.Const(0.0)
    if isinstance(ty, A.Prod):
        return A.DPair(_null_diff(ty.left, rng, avoid), _null_diff(ty.right, rng, avoid))
    x, e = _fresh(avoid, "x"), _fresh(avoid, "e")
    choice = rng.randrange(3)
    if choice == 1 and ty.codomain == ty.domain:
        return A.DLam(x, e, A.DiffVar(e))
    if choice == 2 and ty.domain == A.Real and ty.codomain == A.Real:
        k = rng.uniform(0.0, 3.0)
        return A.DLam(x, e, A.Scalar(A.Arith("*", A.RLit(k), A.RDiff(e))))
    return A.DLam(x, e, _null_diff(ty.codomain, rng, avoid))


# ---------------------------------------------------------------------------
# Metric-set elements
# ---------------------------------------------------------------------------

def metric_elem(ty: A.Type, s: float) -> A.DiffExpr:
    """The canonical element of the metric set of ``ty`` at parameter ``s``."""
    return _metric(ty, _num_expr(s), set())


def _canonical_point(ty: A.Type) -> A.Term:
    if isinstance(ty, A.RealT):
        return A.Lit(0.0)
    if isinstance(ty, A.Prod):
        return A.Pair(_canonical_point(ty.left), _canonical_point(ty.right))
    return A.Lam("z", ty.domain, _canonical_point(ty.codomain))


def metric_param(ty: A.Type, y: A.DiffExpr) -> A.DiffExpr:
    """An expression recovering ``s`` from an element ``y`` of the metric set at ``s``."""
    if isinstance(ty, A.RealT):
        return y
    if isinstance(ty, A.Prod):
        return metric_param(ty.left, A.DFst(y))
    probe = A.DApp(y, A.TermPoint(_canonical_point(ty.domain)), metric_elem(ty.domain, 0.0))
    return metric_param(ty.codomain, probe)


def _metric(ty: A.Type, param: A.DiffExpr, avoid: set[str]) -> A.DiffExpr:
    if isinstance(ty, A.RealT):
        return param
    if isinstance(ty, A.Prod):
        return A.DPair(_metric(ty.left, param, avoid), _metric(ty.right, param, avoid))
    x, e = _fresh(avoid, "x"), _fresh(avoid, "e")
    shifted = A.Add(param, metric_param(ty.domain, A.DiffVar(e)))
    return A.DLam(x, e, _metric(ty.codomain, shifted, avoid))


# ---------------------------------------------------------------------------
# Type-directed program generation
# ---------------------------------------------------------------------------

class TermGenerator:
    """Random well-typed terms.

    ``ifz`` and ``iter`` are only generated in applied form; ``iter`` is
    applied to a literal no larger than ``iter_bound`` so that generated
    programs stay cheap to run.
    """

    def __init__(
        self,
        rng: random.Random,
        prims: Sequence[str] = ("sin", "add1", "pred", "mul2"),
        *,
        registry=None,
        use_ifz: bool = True,
        use_iter: bool = True,
        iter_bound: int = 20,
        lit_range: tuple[float, float] = (-10.0, 10.0),
    ):
        self.rng = rng
        self.registry = resolve(registry)
        self.prims = [p for p in prims if p in self.registry]
        self.use_ifz = use_ifz
        self.use_iter = use_iter
        self.iter_bound = iter_bound
        self.lit_range = lit_range

    def closed(self, ty: A.Type, depth: int) -> A.Term:
        return self.gen(ty, depth, ())

    def lit(self) -> A.Term:
        if self.rng.random() < 0.2:
            return A.Lit(float(self.rng.randint(-3, 3)))
        return A.Lit(round(self.rng.uniform(*self.lit_range), 3))

    def _vars(self, env, ty: A.Type) -> list[str]:
        seen = set()
        out = []
        for name, t in reversed(env):
            if name not in seen:
                seen.add(name)
                if t == ty:
                    out.append(name)
        return out

    def _binder(self, env) -> str:
        return f"x{len(env)}"

    def _prims_of(self, ty: A.Type) -> list[str]:
        return [p for p in self.prims if A.Arrow(A.real_power(self.registry[p].arity), A.Real) == ty]

    def _small_type(self) -> A.Type:
        return self.rng.choice([A.Real, A.Real, A.Arrow(A.Real, A.Real), A.Prod(A.Real, A.Real)])

    def gen(self, ty: A.Type, depth: int, env) -> A.Term:
        rng = self.rng
        vars_ = self._vars(env, ty)
        if isinstance(ty, A.RealT):
            if depth <= 0:
                if vars_ and rng.random() < 0.6:
                    return A.Var(rng.choice(vars_))
                return self.lit()
            options = ["lit", "prim", "prim", "beta", "proj"]
            if vars_:
                options += ["var", "var"]
            if self._callables(env):
                options.append("call")
            if self.use_ifz:
                options.append("ifz")
            if self.use_iter:
                options.append("iter")
            kind = rng.choice(options)
            d = depth - 1
            if kind == "lit":
                return self.lit()
            if kind == "var":
                return A.Var(rng.choice(vars_))
            if kind == "prim" and self.prims:
                p = rng.choice(self.prims)
                arg = self.gen(A.real_power(self.registry[p].arity), d, env)
                return A.App(A.Prim(p, self.registry[p].arity), arg)
            if kind == "beta":
                sigma = self._small_type()
                x = self._binder(env)
                body = self.gen(A.Real, d, env + ((x, sigma),))
                return A.App(A.Lam(x, sigma, body), self.gen(sigma, d, env))
            if kind == "proj":
                other = self._small_type()
                if rng.random() < 0.5:
                    return A.App(A.Proj1(), self.gen(A.Prod(A.Real, other), d, env))
                return A.App(A.Proj2(), self.gen(A.Prod(other, A.Real), d, env))
            if kind == "call":
                name, fty = rng.choice(self._callables(env))
                return A.App(A.Var(name), self.gen(fty.domain, d, env))
            if kind == "ifz":
                f = A.Ifz(self.gen(A.Real, d, env), self.gen(A.Real, d, env))
                return A.App(f, self.gen(A.Real, d, env))
            if kind == "iter":
                f = A.Iter(self.gen(A.Arrow(A.Real, A.Real), d, env), self.gen(A.Real, d, env))
                k = rng.uniform(-1.0, self.iter_bound)
                return A.App(f, A.Lit(round(k, 2)))
            return self.lit()
        if isinstance(ty, A.Prod):
            if vars_ and rng.random() < 0.3:
                return A.Var(rng.choice(vars_))
            return A.Pair(self.gen(ty.left, depth - 1, env), self.gen(ty.right, depth - 1, env))
        # arrows
        prims = self._prims_of(ty)
        options = ["lam", "lam"]
        if vars_:
            options.append("var")
        if prims:
            options += ["prim", "prim"]
        if depth > 0 and ty.domain == A.Real and self.use_ifz:
            options.append("ifz")
        kind = rng.choice(options)
        if kind == "var":
            return A.Var(rng.choice(vars_))
        if kind == "prim":
            p = rng.choice(prims)
            return A.Prim(p, self.registry[p].arity)
        if kind == "ifz":
            return A.Ifz(self.gen(ty.codomain, depth - 1, env), self.gen(ty.codomain, depth - 1, env))
        x = self._binder(env)
        return A.Lam(x, ty.domain, self.gen(ty.codomain, depth - 1, env + ((x, ty.domain),)))

    def _callables(self, env) -> list[tuple[str, A.Arrow]]:
        seen, out = set(), []
        for name, t in reversed(env):
            if name in seen:
                continue
            seen.add(name)
            if isinstance(t, A.Arrow) and t.codomain == A.Real:
                out.append((name, t))
        return out
