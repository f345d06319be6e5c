"""Compositional derivation of self-distances.

``derive_self_distance(env, t)`` builds a difference expression ``d`` meant to
satisfy ``delta(t, d, t)``.  It reads term variables as point variables of the
same name and gives every variable ``x`` a difference variable (listed in
``DerivedDistance.diff_vars``).  Applications are instantiated at the value of
the argument computed from the current points rather than at a supremum over
all arguments.  Conditionals and iteration fall back to the top difference
whenever the perturbation window straddles a branch or iteration-count
boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .diffspace import top_expr
from .errors import SortError, TypeCheckError
from .prims import prim_diameter, resolve
from .syntax import ast as A
from .typecheck import _Checker

__all__ = [
    "DerivedDistance",
    "derive_self_distance",
    "prim_diameter",
    "select_subst",
]

# provenance labels: "core" cases follow the standard proof of the
# fundamental lemma, "extension" cases are the guarded rules for ifz/iter
CORE, EXTENSION = "core", "extension"


@dataclass(frozen=True)
class DerivedDistance:
    expr: A.DiffExpr
    type: A.Type
    diff_vars: Mapping[str, str]
    trace: tuple[tuple[str, str], ...] = field(default=())

    @property
    def uses_extensions(self) -> bool:
        return any(label == EXTENSION for _, label in self.trace)


def derive_self_distance(
    env: Mapping[str, A.Type], t: A.Term, expected: A.Type | None = None, *, registry=None
) -> DerivedDistance:
    reg = resolve(registry)
    d = _Deriver(reg, t, env)
    alpha = {x: d.fresh("e_" + x) for x in env}
    expr, ty = d.derive(dict(env), alpha, t, expected)
    return DerivedDistance(expr, ty, alpha, tuple(d.trace))


def _all_names(t: A.Term) -> set[str]:
    out: set[str] = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, A.Var):
            out.add(u.name)
        elif isinstance(u, A.Lam):
            out.add(u.binder)
            stack.append(u.body)
        elif isinstance(u, (A.App, A.Pair, A.Ifz, A.Iter)):
            stack.extend(getattr(u, f) for f in u.__dataclass_fields__)
    return out


class _Deriver:
    def __init__(self, registry, t: A.Term, env):
        self.registry = registry
        self.checker = _Checker(registry)
        self.avoid = _all_names(t) | set(env)
        self.trace: list[tuple[str, str]] = []

    def fresh(self, base: str) -> str:
        name = A.fresh_name(base, self.avoid)
        self.avoid.add(name)
        return name

    def derive(self, env: dict, alpha: dict, t: A.Term, expected: A.Type | None):
        if isinstance(t, A.Var):
            self.trace.append(("var", CORE))
            if t.name not in env:
                raise TypeCheckError(f"unbound variable {t.name!r}")
            return A.DiffVar(alpha[t.name]), env[t.name]
        if isinstance(t, A.Lit):
            self.trace.append(("const", CORE))
            return A.Const(0.0), A.Real
        if isinstance(t, A.Prim):
            self.trace.append(("prim", CORE))
            ty = self.checker.prim_type(t)
            p, e = self.fresh("p"), self.fresh("e")
            return A.DLam(p, e, A.PrimDiam(t.name, A.RPoint(p), A.DiffVar(e))), ty
        if isinstance(t, A.Lam):
            self.trace.append(("lam", CORE))
            e = self.fresh("e_" + t.binder)
            body, rho = self.derive(
                {**env, t.binder: t.annot}, {**alpha, t.binder: e}, t.body,
                expected.codomain if isinstance(expected, A.Arrow) else None,
            )
            return A.DLam(t.binder, e, body), A.Arrow(t.annot, rho)
        if isinstance(t, A.Pair):
            self.trace.append(("pair", CORE))
            el = expected.left if isinstance(expected, A.Prod) else None
            er = expected.right if isinstance(expected, A.Prod) else None
            dl, tl = self.derive(env, alpha, t.left, el)
            dr, tr = self.derive(env, alpha, t.right, er)
            return A.DPair(dl, dr), A.Prod(tl, tr)
        if isinstance(t, (A.Proj1, A.Proj2)):
            self.trace.append(("proj", CORE))
            if expected is None:
                self.checker.check(env, t, A.Arrow(A.Prod(A.Real, A.Real), A.Real))
            self.checker.check(env, t, expected)
            p, e = self.fresh("p"), self.fresh("e")
            sel = A.DFst(A.DiffVar(e)) if isinstance(t, A.Proj1) else A.DSnd(A.DiffVar(e))
            return A.DLam(p, e, sel), expected
        if isinstance(t, A.App):
            return self.derive_app(env, alpha, t, expected)
        if isinstance(t, A.Ifz):
            self.trace.append(("ifz", EXTENSION))
            ty = expected or self.checker.infer(env, t)
            self.checker.check(env, t, ty)
            tau = ty.codomain
            dl, _ = self.derive(env, alpha, t.then, tau)
            dp, _ = self.derive(env, alpha, t.else_, tau)
            p, e = self.fresh("p"), self.fresh("e")
            body = A.IfzDiff(A.RPoint(p), A.DiffVar(e), dl, dp, _cross(t.then, t.else_, tau, dl, dp))
            return A.DLam(p, e, body), ty
        if isinstance(t, A.Iter):
            self.trace.append(("iter", EXTENSION))
            ty = expected or self.checker.infer(env, t)
            self.checker.check(env, t, ty)
            tau = ty.codomain
            dl, _ = self.derive(env, alpha, t.step, A.Arrow(tau, tau))
            dp, _ = self.derive(env, alpha, t.base, tau)
            p, e = self.fresh("p"), self.fresh("e")
            body = A.IterDiff(A.RPoint(p), A.DiffVar(e), t.step, t.base, dl, dp, top_expr(tau))
            return A.DLam(p, e, body), ty
        raise TypeCheckError(f"not a term: {t!r}")

    def derive_app(self, env, alpha, t: A.App, expected):
        self.trace.append(("app", CORE))
        f, a = t.fun, t.arg
        if isinstance(f, (A.Proj1, A.Proj2)):
            da, ta = self.derive(env, alpha, a, None)
            if not isinstance(ta, A.Prod):
                raise TypeCheckError("projection of a non-pair")
            out = ta.left if isinstance(f, A.Proj1) else ta.right
            df, _ = self.derive(env, alpha, f, A.Arrow(ta, out))
        else:
            try:
                fty = self.checker.infer(env, f)
            except TypeCheckError:
                fty = A.Arrow(self.checker.infer(env, a), expected)
            if not isinstance(fty, A.Arrow):
                raise TypeCheckError("application of a non-function")
            df, _ = self.derive(env, alpha, f, fty)
            da, _ = self.derive(env, alpha, a, fty.domain)
            out = fty.codomain
        return A.DApp(df, A.TermPoint(a), da), out


def _cross(l: A.Term, p: A.Term, tau: A.Type, dl: A.DiffExpr, dp: A.DiffExpr) -> A.DiffExpr:
    """Distance between the two branches of an ifz, used when the window straddles 0.

    At Real, ``|L - P| + dl + dp`` (evaluated at the current points) bounds
    both cross comparisons by the triangle inequality; products of reals go
    componentwise.  Any arrow inside falls back to the top difference.
    """
    if isinstance(tau, A.RealT):
        gap = A.AbsReal(A.Arith("-", A.TermPoint(l), A.TermPoint(p)))
        return A.Add(gap, A.Add(dl, dp))
    if isinstance(tau, A.Prod) and A.type_order(tau) == 0:
        return A.DPair(
            _cross(A.App(A.Proj1(), l), A.App(A.Proj1(), p), tau.left, A.DFst(dl), A.DFst(dp)),
            _cross(A.App(A.Proj2(), l), A.App(A.Proj2(), p), tau.right, A.DSnd(dl), A.DSnd(dp)),
        )
    return top_expr(tau)


def select_subst(
    v: Mapping[str, A.Term], w: Mapping[str, A.Term], mask: Mapping[str, int]
) -> dict[str, A.Term]:
    """Pick ``v[x]`` where ``mask[x]`` is 0 and ``w[x]`` where it is 1."""
    if set(v) != set(w) or set(v) != set(mask):
        raise SortError("value families and mask must share one domain")
    out = {}
    for x in v:
        if mask[x] not in (0, 1):
            raise SortError(f"mask entry for {x!r} must be 0 or 1")
        out[x] = w[x] if mask[x] else v[x]
    return out
