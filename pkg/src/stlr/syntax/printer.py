"""Printers producing text that the parsers read back."""

from __future__ import annotations

import math

from . import ast as A

# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


def print_type(ty: A.Type) -> str:
    return _type(ty, 0)


def _type(ty: A.Type, level: int) -> str:
    # level 0: arrow allowed, 1: product operand (left), 2: atom
    if isinstance(ty, A.RealT):
        return "Real"
    if isinstance(ty, A.Arrow):
        s = f"{_type(ty.domain, 1)} -> {_type(ty.codomain, 0)}"
        return s if level == 0 else f"({s})"
    s = f"{_type(ty.left, 1)} * {_type(ty.right, 2)}"
    return s if level <= 1 else f"({s})"


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

def format_real(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(float(x))


def print_term(t: A.Term) -> str:
    return _term(t, 0)


_RESERVED = frozenset({"fst", "snd", "ifz", "iter", "Real", "inf", "nan"})


def _safe_binder(t: A.Lam) -> A.Lam:
    """Rename a binder that would be misread as a primitive or keyword."""
    clash = t.binder in _RESERVED or t.binder in A.prim_names(t.body)
    if not clash:
        return t
    avoid = A.free_vars(t.body) | A.prim_names(t.body) | _RESERVED
    new = A.fresh_name(t.binder + "_", avoid)
    return A.Lam(new, t.annot, A.substitute(t.body, {t.binder: A.Var(new)}))


def _term(t: A.Term, level: int) -> str:
    # level 0: anything, 1: application head, 2: argument
    if isinstance(t, A.Lam):
        t = _safe_binder(t)
        s = f"\\{t.binder}:{print_type(t.annot)}. {_term(t.body, 0)}"
        return s if level == 0 else f"({s})"
    if isinstance(t, A.App):
        s = f"{_term(t.fun, 1)} {_term(t.arg, 2)}"
        return s if level <= 1 else f"({s})"
    if isinstance(t, A.Lit):
        s = format_real(t.value)
        negative = s.startswith("-")
        return f"({s})" if negative and level > 0 else s
    if isinstance(t, A.Var):
        return t.name
    if isinstance(t, A.Prim):
        return t.name
    if isinstance(t, A.Pair):
        return f"<{_term(t.left, 0)}, {_term(t.right, 0)}>"
    if isinstance(t, A.Proj1):
        return "fst"
    if isinstance(t, A.Proj2):
        return "snd"
    if isinstance(t, A.Ifz):
        return f"ifz({_term(t.then, 0)}, {_term(t.else_, 0)})"
    if isinstance(t, A.Iter):
        return f"iter({_term(t.step, 0)}, {_term(t.base, 0)})"
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Point and difference expressions
# ---------------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def print_real(r: A.RealExpr) -> str:
    return _real(r, 0)


def _real(r, level: int) -> str:
    # levels: 0 top, 1 sum, 2 product, 3 unary, 4 atom
    if isinstance(r, A.RLit):
        s = format_real(r.value)
        return f"({s})" if s.startswith("-") and level >= 4 else s
    if isinstance(r, (A.RPoint, A.RDiff)):
        return r.name
    if isinstance(r, A.Neg):
        s = f"-({_real(r.arg, 0)})"
        return s if level <= 3 else f"({s})"
    if isinstance(r, A.Arith):
        p = _PREC[r.op]
        s = f"{_real(r.left, p)} {r.op} {_real(r.right, p + 1)}"
        return s if level <= p else f"({s})"
    if isinstance(r, A.PrimApp):
        return f"{r.prim}({', '.join(_real(a, 0) for a in r.args)})"
    if isinstance(r, A.PointApp):
        return f"{r.name}({', '.join(_real(a, 0) for a in r.args)})"
    if isinstance(r, A.SemApp):
        return f"nf({print_term(r.term)})({', '.join(_real(a, 0) for a in r.args)})"
    if isinstance(r, A.TermPoint):
        return f"nf({print_term(r.term)})"
    raise TypeError(f"not a point expression: {r!r}")


def print_diff(d: A.DiffExpr) -> str:
    return _diff(d, 0)


def _diff(d, level: int) -> str:
    # levels: 0 top (dlam), 1 sum, 2 postfix operand / prefix, 3 atom
    if isinstance(d, A.Const):
        return format_real(d.value)
    if isinstance(d, A.Infinity):
        return "inf"
    if isinstance(d, (A.PointVar, A.DiffVar)):
        return d.name
    if isinstance(d, A.Add):
        s = f"{_diff(d.left, 1)} + {_diff(d.right, 2)}"
        return s if level <= 1 else f"({s})"
    if isinstance(d, A.AbsReal):
        return f"abs({_real(d.expr, 0)})"
    if isinstance(d, A.Scalar):
        return f"real({_real(d.expr, 0)})"
    if isinstance(d, A.DLam):
        s = f"dlam ({d.point}, {d.diff}). {_diff(d.body, 0)}"
        return s if level == 0 else f"({s})"
    if isinstance(d, A.DApp):
        s = f"{_diff(d.fun, 2)} @ ({_real(d.point, 0)}, {_diff(d.diff, 0)})"
        return s if level <= 2 else f"({s})"
    if isinstance(d, A.DPair):
        return f"<{_diff(d.left, 0)}, {_diff(d.right, 0)}>"
    if isinstance(d, (A.DFst, A.DSnd)):
        kw = "dfst" if isinstance(d, A.DFst) else "dsnd"
        s = f"{kw} {_diff(d.arg, 3)}"
        return s if level <= 2 else f"({s})"
    if isinstance(d, A.FinSup):
        return "sup{" + ", ".join(_diff(i, 0) for i in d.items) + "}"
    if isinstance(d, A.PrimDiam):
        return f"diam({d.prim}, {_real(d.center, 0)}, {_diff(d.radius, 0)})"
    if isinstance(d, A.IfzDiff):
        parts = [_real(d.center, 0)] + [_diff(x, 0) for x in (d.radius, d.neg, d.nonneg, d.top)]
        return "ifzd(" + ", ".join(parts) + ")"
    if isinstance(d, A.IterDiff):
        parts = [
            _real(d.center, 0), _diff(d.radius, 0),
            f"nf({print_term(d.step)})", f"nf({print_term(d.base)})",
            _diff(d.step_diff, 0), _diff(d.base_diff, 0), _diff(d.top, 0),
        ]
        return "iterd(" + ", ".join(parts) + ")"
    raise TypeError(f"not a difference expression: {d!r}")
