"""Big-step call-by-value evaluation with a step budget.

Evaluation runs on closures and environments for speed.  ``readback`` turns a
runtime value back into a closed value term, and by construction that term is
the one substitution-based evaluation would produce.

Steps count rule applications: one per evaluated subterm, plus the synthetic
subterms that the iteration rule unfolds into.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Mapping, Union

from .errors import EvalError, FuelExhausted
from .prims import resolve
from .syntax import ast as A

DEFAULT_FUEL = 10**6

if sys.getrecursionlimit() < 20000:
    sys.setrecursionlimit(20000)


@dataclass(frozen=True, eq=False)
class Closure:
    binder: str
    annot: A.Type
    body: A.Term
    env: Mapping[str, "Value"]


@dataclass(frozen=True, eq=False)
class PairV:
    """A pair of unevaluated terms; pairs of terms are values."""
    left: A.Term
    right: A.Term
    env: Mapping[str, "Value"]


@dataclass(frozen=True, eq=False)
class IfzV:
    then: A.Term
    else_: A.Term
    env: Mapping[str, "Value"]


@dataclass(frozen=True, eq=False)
class IterV:
    step: A.Term
    base: A.Term
    env: Mapping[str, "Value"]


# floats are reals; Prim, Proj1 and Proj2 nodes stand for themselves
Value = Union[float, A.Prim, A.Proj1, A.Proj2, Closure, PairV, IfzV, IterV]


@dataclass(frozen=True)
class EvalReport:
    value: A.Term
    steps: int


def _close(t: A.Term, env: Mapping[str, Value]) -> A.Term:
    fv = A.free_vars(t)
    if not fv:
        return t
    return A.substitute(t, {x: readback(env[x]) for x in fv if x in env})


def readback(v: Value) -> A.Term:
    """The closed value term denoted by a runtime value."""
    if isinstance(v, float):
        return A.Lit(v)
    if isinstance(v, (A.Prim, A.Proj1, A.Proj2)):
        return v
    if isinstance(v, Closure):
        return _close(A.Lam(v.binder, v.annot, v.body), v.env)
    if isinstance(v, PairV):
        return _close(A.Pair(v.left, v.right), v.env)
    if isinstance(v, IfzV):
        return _close(A.Ifz(v.then, v.else_), v.env)
    if isinstance(v, IterV):
        return _close(A.Iter(v.step, v.base), v.env)
    raise TypeError(f"not a value: {v!r}")


class Machine:
    """One evaluation context: a registry, a fuel budget and a step counter."""

    def __init__(self, fuel: int = DEFAULT_FUEL, registry=None):
        if fuel < 1:
            raise ValueError("fuel must be positive")
        self.fuel = fuel
        self.steps = 0
        self.registry = resolve(registry)

    def tick(self, n: int = 1) -> None:
        self.steps += n
        if self.steps > self.fuel:
            raise FuelExhausted(self.fuel)

    def eval(self, t: A.Term, env: Mapping[str, Value] | None = None) -> Value:
        try:
            return self._eval(t, env or {})
        except RecursionError:
            raise EvalError("term nests too deeply to evaluate") from None

    def _eval(self, t: A.Term, env: Mapping[str, Value]) -> Value:
        self.tick()
        if isinstance(t, A.Lit):
            return float(t.value)
        if isinstance(t, A.Var):
            try:
                return env[t.name]
            except KeyError:
                raise EvalError(f"free variable {t.name!r}") from None
        if isinstance(t, A.App):
            f = self._eval(t.fun, env)
            a = self._eval(t.arg, env)
            return self._apply(f, a)
        if isinstance(t, A.Lam):
            return Closure(t.binder, t.annot, t.body, env)
        if isinstance(t, (A.Prim, A.Proj1, A.Proj2)):
            return t
        if isinstance(t, A.Pair):
            return PairV(t.left, t.right, env)
        if isinstance(t, A.Ifz):
            return IfzV(t.then, t.else_, env)
        if isinstance(t, A.Iter):
            return IterV(t.step, t.base, env)
        raise EvalError(f"not a term: {t!r}")

    def apply(self, f: Value, a: Value) -> Value:
        """Apply a function value to an argument value, counting the rule."""
        try:
            self.tick()
            return self._apply(f, a)
        except RecursionError:
            raise EvalError("term nests too deeply to evaluate") from None

    def _apply(self, f: Value, a: Value) -> Value:
        if isinstance(f, Closure):
            return self._eval(f.body, {**f.env, f.binder: a})
        if isinstance(f, A.Prim):
            args = self._gather(a, f.arity)
            return self.call_prim(f.name, args)
        if isinstance(f, (A.Proj1, A.Proj2)):
            if not isinstance(a, PairV):
                raise EvalError("projection of a non-pair")
            return self._eval(a.left if isinstance(f, A.Proj1) else a.right, a.env)
        if isinstance(f, IfzV):
            r = self._real(a, "ifz")
            return self._eval(f.then if r < 0 else f.else_, f.env)
        if isinstance(f, IterV):
            return self._iterate(f, self._real(a, "iter"))
        raise EvalError(f"cannot apply a non-function value {readback(f)!r}")

    def _real(self, a: Value, what: str) -> float:
        if not isinstance(a, float):
            raise EvalError(f"{what} applied to a non-real")
        if math.isnan(a):
            raise EvalError(f"{what} applied to nan, which is neither negative nor nonnegative")
        return a

    def _gather(self, a: Value, n: int) -> tuple[float, ...]:
        if n == 1:
            if not isinstance(a, float):
                raise EvalError("primitive applied to a non-real")
            return (a,)
        if not isinstance(a, PairV):
            raise EvalError("n-ary primitive applied to a non-tuple")
        left = self._gather(self._eval(a.left, a.env), n - 1)
        right = self._eval(a.right, a.env)
        if not isinstance(right, float):
            raise EvalError("primitive applied to a non-real component")
        return left + (right,)

    def call_prim(self, name: str, args: tuple[float, ...]) -> float:
        spec = self.registry[name]
        try:
            return float(spec.eval(*args))
        except (ValueError, OverflowError):
            return math.nan

    def _iterate(self, f: IterV, r: float) -> Value:
        # r >= 0 rewrites to L((iter L P)(pred r)); unfold the chain of
        # predecessors first, then apply L from the inside out.
        count = 0
        while r >= 0:
            # App, L, App, the iter value, and the three steps of pred r
            self.tick(5)
            count += 1
            r = self.call_prim("pred", (r,)) if "pred" in self.registry else r - 1.0
            if math.isnan(r):
                raise EvalError("iteration counter became nan")
        value = self._eval(f.base, f.env)
        if count == 0:
            return value
        before = self.steps
        step = self._eval(f.step, f.env)
        cost = self.steps - before
        for i in range(count):
            if i:
                self.tick(cost)
            value = self._apply(step, value)
        return value


def eval_term(t: A.Term, fuel: int = DEFAULT_FUEL, *, registry=None) -> EvalReport:
    """Evaluate a closed term and read its value back as a term."""
    m = Machine(fuel, registry)
    v = m.eval(t)
    return EvalReport(readback(v), m.steps)


eval = eval_term  # noqa: A001  the public name of the operation


def value_of(t: A.Term, fuel: int = DEFAULT_FUEL, *, registry=None) -> Value:
    return Machine(fuel, registry).eval(t)


def nf_real(t: A.Term, fuel: int = DEFAULT_FUEL, *, registry=None) -> float:
    """The real a closed term of type Real evaluates to."""
    v = value_of(t, fuel, registry=registry)
    if not isinstance(v, float):
        raise EvalError("term does not evaluate to a real")
    return v
