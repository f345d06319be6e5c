"""Abstract syntax for types, terms and difference expressions.

All nodes are frozen dataclasses, so structural equality and hashing come for
free.  Reals are binary64 floats throughout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Union


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RealT:
    pass


@dataclass(frozen=True)
class Arrow:
    domain: "Type"
    codomain: "Type"


@dataclass(frozen=True)
class Prod:
    left: "Type"
    right: "Type"


Type = Union[RealT, Arrow, Prod]
Real = RealT()


def real_power(n: int) -> Type:
    """Left-nested product ``Real * Real * ... * Real`` with ``n`` factors."""
    if n < 1:
        raise ValueError("arity must be at least 1")
    ty: Type = Real
    for _ in range(n - 1):
        ty = Prod(ty, Real)
    return ty


def type_order(ty: Type) -> int:
    """Functional order: 0 for Real, +1 for each arrow nested on the left."""
    if isinstance(ty, RealT):
        return 0
    if isinstance(ty, Prod):
        return max(type_order(ty.left), type_order(ty.right))
    return max(type_order(ty.domain) + 1, type_order(ty.codomain))


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Lit:
    value: float


@dataclass(frozen=True)
class Prim:
    name: str
    arity: int


@dataclass(frozen=True)
class Lam:
    binder: str
    annot: Type
    body: "Term"


@dataclass(frozen=True)
class App:
    fun: "Term"
    arg: "Term"


@dataclass(frozen=True)
class Pair:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Proj1:
    pass


@dataclass(frozen=True)
class Proj2:
    pass


@dataclass(frozen=True)
class Ifz:
    then: "Term"
    else_: "Term"


@dataclass(frozen=True)
class Iter:
    step: "Term"
    base: "Term"


Term = Union[Var, Lit, Prim, Lam, App, Pair, Proj1, Proj2, Ifz, Iter]

_VALUE_TYPES = (Lit, Prim, Lam, Pair, Proj1, Proj2, Ifz, Iter)


def is_value(t: Term) -> bool:
    return isinstance(t, _VALUE_TYPES)


def apply_all(fun: Term, *args: Term) -> Term:
    for a in args:
        fun = App(fun, a)
    return fun


def tuple_term(items: Iterable[Term]) -> Term:
    """``<M1, ..., Mn>`` as left-nested pairs."""
    items = list(items)
    if not items:
        raise ValueError("empty tuple")
    acc = items[0]
    for t in items[1:]:
        acc = Pair(acc, t)
    return acc


def free_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Lam):
        return free_vars(t.body) - {t.binder}
    if isinstance(t, App):
        return free_vars(t.fun) | free_vars(t.arg)
    if isinstance(t, Pair):
        return free_vars(t.left) | free_vars(t.right)
    if isinstance(t, Ifz):
        return free_vars(t.then) | free_vars(t.else_)
    if isinstance(t, Iter):
        return free_vars(t.step) | free_vars(t.base)
    return frozenset()


def prim_names(t: Term) -> set[str]:
    out: set[str] = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Prim):
            out.add(u.name)
        elif isinstance(u, Lam):
            stack.append(u.body)
        elif isinstance(u, App):
            stack += [u.fun, u.arg]
        elif isinstance(u, Pair):
            stack += [u.left, u.right]
        elif isinstance(u, Ifz):
            stack += [u.then, u.else_]
        elif isinstance(u, Iter):
            stack += [u.step, u.base]
    return out


def term_depth(t: Term) -> int:
    if isinstance(t, Lam):
        return 1 + term_depth(t.body)
    if isinstance(t, App):
        return 1 + max(term_depth(t.fun), term_depth(t.arg))
    if isinstance(t, Pair):
        return 1 + max(term_depth(t.left), term_depth(t.right))
    if isinstance(t, Ifz):
        return 1 + max(term_depth(t.then), term_depth(t.else_))
    if isinstance(t, Iter):
        return 1 + max(term_depth(t.step), term_depth(t.base))
    return 0


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    avoid = set(avoid)
    if base not in avoid:
        return base
    stem = base.rstrip("0123456789") or "v"
    for i in itertools.count(1):
        cand = f"{stem}{i}"
        if cand not in avoid:
            return cand
    raise AssertionError("unreachable")


def substitute(t: Term, mapping: Mapping[str, Term]) -> Term:
    """Capture-avoiding simultaneous substitution ``t{mapping}``."""
    if not mapping:
        return t
    fv_map: frozenset[str] = frozenset().union(*(free_vars(v) for v in mapping.values()))
    return _subst(t, dict(mapping), fv_map)


def _subst(t: Term, m: dict[str, Term], fv_m: frozenset[str]) -> Term:
    if isinstance(t, Var):
        return m.get(t.name, t)
    if isinstance(t, Lam):
        inner = {k: v for k, v in m.items() if k != t.binder}
        if not inner:
            return t
        binder, body = t.binder, t.body
        if binder in fv_m:
            new = fresh_name(binder, fv_m | free_vars(body) | set(inner))
            body = _subst(body, {binder: Var(new)}, frozenset((new,)))
            binder = new
        return Lam(binder, t.annot, _subst(body, inner, fv_m))
    if isinstance(t, App):
        return App(_subst(t.fun, m, fv_m), _subst(t.arg, m, fv_m))
    if isinstance(t, Pair):
        return Pair(_subst(t.left, m, fv_m), _subst(t.right, m, fv_m))
    if isinstance(t, Ifz):
        return Ifz(_subst(t.then, m, fv_m), _subst(t.else_, m, fv_m))
    if isinstance(t, Iter):
        return Iter(_subst(t.step, m, fv_m), _subst(t.base, m, fv_m))
    return t


def alpha_equal(a: Term, b: Term) -> bool:
    return _alpha(a, b, {}, {})


def _alpha(a: Term, b: Term, ea: dict[str, int], eb: dict[str, int]) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, Var):
        ia, ib = ea.get(a.name), eb.get(b.name)
        if ia is None and ib is None:
            return a.name == b.name
        return ia == ib
    if isinstance(a, Lam):
        if a.annot != b.annot:
            return False
        depth = len(ea) + len(eb)
        return _alpha(a.body, b.body, {**ea, a.binder: depth}, {**eb, b.binder: depth})
    if isinstance(a, Lit):
        # bitwise comparison so that -0.0 and nan behave predictably
        return repr(a.value) == repr(b.value)
    if isinstance(a, App):
        return _alpha(a.fun, b.fun, ea, eb) and _alpha(a.arg, b.arg, ea, eb)
    if isinstance(a, Pair):
        return _alpha(a.left, b.left, ea, eb) and _alpha(a.right, b.right, ea, eb)
    if isinstance(a, Ifz):
        return _alpha(a.then, b.then, ea, eb) and _alpha(a.else_, b.else_, ea, eb)
    if isinstance(a, Iter):
        return _alpha(a.step, b.step, ea, eb) and _alpha(a.base, b.base, ea, eb)
    return a == b


# ---------------------------------------------------------------------------
# Point expressions (arguments fed to difference functions)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RLit:
    value: float


@dataclass(frozen=True)
class RPoint:
    """A point variable bound by an enclosing ``dlam``."""
    name: str


@dataclass(frozen=True)
class RDiff:
    """A Real-sorted difference variable used as a number."""
    name: str


@dataclass(frozen=True)
class PrimApp:
    prim: str
    args: tuple["RealExpr", ...]


@dataclass(frozen=True)
class SemApp:
    """``nf(M)(R1, ..., Rk)``: a closed term applied to point arguments."""
    term: Term
    args: tuple["RealExpr", ...]


@dataclass(frozen=True)
class PointApp:
    """``g(R1, ..., Rk)`` where ``g`` is a function-valued point variable."""
    name: str
    args: tuple["RealExpr", ...]


@dataclass(frozen=True)
class TermPoint:
    """``nf(M)`` where ``M`` may mention the point variables in scope."""
    term: Term


@dataclass(frozen=True)
class Arith:
    op: str  # one of + - * /
    left: "RealExpr"
    right: "RealExpr"


@dataclass(frozen=True)
class Neg:
    arg: "RealExpr"


RealExpr = Union[RLit, RPoint, RDiff, PrimApp, SemApp, PointApp, TermPoint, Arith, Neg]


# ---------------------------------------------------------------------------
# Difference expressions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Infinity:
    pass


@dataclass(frozen=True)
class PointVar:
    name: str


@dataclass(frozen=True)
class DiffVar:
    name: str


@dataclass(frozen=True)
class Add:
    left: "DiffExpr"
    right: "DiffExpr"


@dataclass(frozen=True)
class AbsReal:
    expr: RealExpr


@dataclass(frozen=True)
class Scalar:
    """A real expression used directly as a difference; must be nonnegative."""
    expr: RealExpr


@dataclass(frozen=True)
class DLam:
    point: str
    diff: str
    body: "DiffExpr"


@dataclass(frozen=True)
class DApp:
    fun: "DiffExpr"
    point: RealExpr
    diff: "DiffExpr"


@dataclass(frozen=True)
class DPair:
    left: "DiffExpr"
    right: "DiffExpr"


@dataclass(frozen=True)
class DFst:
    arg: "DiffExpr"


@dataclass(frozen=True)
class DSnd:
    arg: "DiffExpr"


@dataclass(frozen=True)
class FinSup:
    items: tuple["DiffExpr", ...]


@dataclass(frozen=True)
class PrimDiam:
    prim: str
    center: RealExpr
    radius: "DiffExpr"


@dataclass(frozen=True)
class IfzDiff:
    """Branch-guarded difference for ``ifz``.

    Yields ``neg`` when ``[c-r, c+r]`` lies below zero, ``nonneg`` when it lies
    in ``[0, inf)`` and ``top`` otherwise.
    """
    center: RealExpr
    radius: "DiffExpr"
    neg: "DiffExpr"
    nonneg: "DiffExpr"
    top: "DiffExpr"


@dataclass(frozen=True)
class IterDiff:
    """Iteration-count-guarded difference for ``iter(step, base)``."""
    center: RealExpr
    radius: "DiffExpr"
    step: Term
    base: Term
    step_diff: "DiffExpr"
    base_diff: "DiffExpr"
    top: "DiffExpr"


DiffExpr = Union[
    Const, Infinity, PointVar, DiffVar, Add, AbsReal, Scalar, DLam, DApp, DPair,
    DFst, DSnd, FinSup, PrimDiam, IfzDiff, IterDiff,
]


def diff_names(d) -> set[str]:
    """Every identifier occurring in a difference or point expression."""
    out: set[str] = set()
    stack = [d]
    while stack:
        u = stack.pop()
        if isinstance(u, (PointVar, DiffVar, RPoint, RDiff)):
            out.add(u.name)
        elif isinstance(u, PointApp):
            out.add(u.name)
            stack.extend(u.args)
        elif isinstance(u, DLam):
            out |= {u.point, u.diff}
            stack.append(u.body)
        elif isinstance(u, (SemApp, TermPoint)):
            out |= free_vars(u.term)
            if isinstance(u, SemApp):
                stack.extend(u.args)
        elif isinstance(u, IterDiff):
            out |= free_vars(u.step) | free_vars(u.base)
            stack += [u.center, u.radius, u.step_diff, u.base_diff, u.top]
        elif hasattr(u, "__dataclass_fields__"):
            for f in u.__dataclass_fields__:
                v = getattr(u, f)
                if isinstance(v, tuple):
                    stack.extend(v)
                elif hasattr(v, "__dataclass_fields__"):
                    stack.append(v)
    return out
