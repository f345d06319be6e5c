"""Bidirectional type checking.

``fst``, ``snd``, ``ifz`` and ``iter`` have schematic types.  Projections get
theirs from the argument when applied and from the expected type otherwise;
``ifz`` and ``iter`` are determined by their components.
"""

from __future__ import annotations

from typing import Mapping

from .errors import AmbiguousTypeError, RegistryError, TypeCheckError
from .prims import resolve
from .syntax import ast as A
from .syntax.printer import print_term, print_type

TypeEnv = Mapping[str, A.Type]


def _show(t: A.Term, limit: int = 60) -> str:
    s = print_term(t)
    return s if len(s) <= limit else s[: limit - 3] + "..."


def infer(env: TypeEnv, t: A.Term, *, registry=None) -> A.Type:
    return _Checker(resolve(registry)).infer(dict(env), t)


def check_against(env: TypeEnv, t: A.Term, expected: A.Type, *, registry=None) -> None:
    _Checker(resolve(registry)).check(dict(env), t, expected)


def type_of_closed(t: A.Term, expected: A.Type | None = None, *, registry=None) -> A.Type:
    """Type of a closed term, using ``expected`` when one is given."""
    if expected is not None:
        check_against({}, t, expected, registry=registry)
        return expected
    return infer({}, t, registry=registry)


class _Checker:
    def __init__(self, registry):
        self.registry = registry

    def infer(self, env: dict, t: A.Term) -> A.Type:
        if isinstance(t, A.Var):
            try:
                return env[t.name]
            except KeyError:
                raise TypeCheckError(f"unbound variable {t.name!r}") from None
        if isinstance(t, A.Lit):
            return A.Real
        if isinstance(t, A.Prim):
            return self.prim_type(t)
        if isinstance(t, A.Lam):
            return A.Arrow(t.annot, self.infer({**env, t.binder: t.annot}, t.body))
        if isinstance(t, A.Pair):
            return A.Prod(self.infer(env, t.left), self.infer(env, t.right))
        if isinstance(t, (A.Proj1, A.Proj2)):
            name = "fst" if isinstance(t, A.Proj1) else "snd"
            raise AmbiguousTypeError(f"cannot determine the type of a bare {name!r}")
        if isinstance(t, A.Ifz):
            try:
                ty = self.infer(env, t.then)
                self.check(env, t.else_, ty)
            except AmbiguousTypeError:
                ty = self.infer(env, t.else_)
                self.check(env, t.then, ty)
            return A.Arrow(A.Real, ty)
        if isinstance(t, A.Iter):
            try:
                ty = self.infer(env, t.base)
                self.check(env, t.step, A.Arrow(ty, ty))
            except AmbiguousTypeError:
                st = self.infer(env, t.step)
                if not (isinstance(st, A.Arrow) and st.domain == st.codomain):
                    raise TypeCheckError(
                        f"iter step {_show(t.step)} has type {print_type(st)}, not T -> T"
                    ) from None
                ty = st.domain
                self.check(env, t.base, ty)
            return A.Arrow(A.Real, ty)
        if isinstance(t, A.App):
            return self.infer_app(env, t)
        raise TypeCheckError(f"not a term: {t!r}")

    def prim_type(self, t: A.Prim) -> A.Type:
        try:
            spec = self.registry[t.name]
        except RegistryError as exc:
            raise TypeCheckError(str(exc)) from None
        if spec.arity != t.arity:
            raise TypeCheckError(
                f"primitive {t.name!r} has arity {spec.arity}, node says {t.arity}"
            )
        return A.Arrow(A.real_power(spec.arity), A.Real)

    def infer_app(self, env: dict, t: A.App) -> A.Type:
        f, a = t.fun, t.arg
        if isinstance(f, (A.Proj1, A.Proj2)):
            ta = self.infer(env, a)
            if not isinstance(ta, A.Prod):
                raise TypeCheckError(
                    f"projection applied to {_show(a)} of non-product type {print_type(ta)}"
                )
            return ta.left if isinstance(f, A.Proj1) else ta.right
        tf = self.infer(env, f)
        if not isinstance(tf, A.Arrow):
            raise TypeCheckError(f"{_show(f)} of type {print_type(tf)} is applied but is not a function")
        self.check_arg(env, f, a, tf.domain)
        return tf.codomain

    def check_arg(self, env: dict, f: A.Term, a: A.Term, dom: A.Type) -> None:
        try:
            self.check(env, a, dom)
        except TypeCheckError as exc:
            if isinstance(f, A.Prim) and not isinstance(exc, AmbiguousTypeError):
                raise TypeCheckError(
                    f"arity mismatch: primitive {f.name!r} expects {print_type(dom)}: {exc}"
                ) from None
            raise

    def check(self, env: dict, t: A.Term, expected: A.Type) -> None:
        if isinstance(t, (A.Proj1, A.Proj2)):
            ok = (
                isinstance(expected, A.Arrow)
                and isinstance(expected.domain, A.Prod)
                and expected.codomain
                == (expected.domain.left if isinstance(t, A.Proj1) else expected.domain.right)
            )
            if not ok:
                name = "fst" if isinstance(t, A.Proj1) else "snd"
                raise TypeCheckError(f"{name!r} cannot have type {print_type(expected)}")
            return
        if isinstance(t, A.Lam):
            if not isinstance(expected, A.Arrow) or expected.domain != t.annot:
                raise TypeCheckError(
                    f"{_show(t)} cannot have type {print_type(expected)}"
                )
            self.check({**env, t.binder: t.annot}, t.body, expected.codomain)
            return
        if isinstance(t, A.Pair):
            if not isinstance(expected, A.Prod):
                raise TypeCheckError(f"pair {_show(t)} cannot have type {print_type(expected)}")
            self.check(env, t.left, expected.left)
            self.check(env, t.right, expected.right)
            return
        if isinstance(t, (A.Ifz, A.Iter)):
            if not isinstance(expected, A.Arrow) or expected.domain != A.Real:
                raise TypeCheckError(f"{_show(t)} cannot have type {print_type(expected)}")
            ty = expected.codomain
            if isinstance(t, A.Ifz):
                self.check(env, t.then, ty)
                self.check(env, t.else_, ty)
            else:
                self.check(env, t.step, A.Arrow(ty, ty))
                self.check(env, t.base, ty)
            return
        if isinstance(t, A.App) and not isinstance(t.fun, (A.Proj1, A.Proj2)):
            try:
                tf = self.infer(env, t.fun)
            except AmbiguousTypeError:
                ta = self.infer(env, t.arg)
                self.check(env, t.fun, A.Arrow(ta, expected))
                return
            if not isinstance(tf, A.Arrow):
                raise TypeCheckError(
                    f"{_show(t.fun)} of type {print_type(tf)} is applied but is not a function"
                )
            self.check_arg(env, t.fun, t.arg, tf.domain)
            if tf.codomain != expected:
                raise TypeCheckError(
                    f"{_show(t)} has type {print_type(tf.codomain)}, expected {print_type(expected)}"
                )
            return
        actual = self.infer(env, t)
        if actual != expected:
            raise TypeCheckError(
                f"{_show(t)} has type {print_type(actual)}, expected {print_type(expected)}"
            )
