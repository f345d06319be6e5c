"""Recursive-descent parsers for types, terms and difference expressions.

Difference expressions are parsed in two passes.  The first builds an untyped
raw tree; the second elaborates it against the expected difference sort, which
is what decides whether ``x - sin(x)`` is a real-valued point expression or
whether ``e`` names a point or a difference.
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping

from ..errors import ParseError, SortError, StlrError
from . import ast as A
from .lexer import TokenStream, describe, tokenize

TERM_KEYWORDS = frozenset({"fst", "snd", "ifz", "iter", "Real", "inf", "nan"})
DIFF_KEYWORDS = frozenset({
    "dlam", "inf", "abs", "sup", "diam", "nf", "dfst", "dsnd", "real", "ifzd", "iterd",
})


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

def _type(ts: TokenStream) -> A.Type:
    dom = _prod_type(ts)
    if ts.accept("->"):
        return A.Arrow(dom, _type(ts))
    return dom


def _prod_type(ts: TokenStream) -> A.Type:
    ty = _atom_type(ts)
    while ts.accept("*"):
        ty = A.Prod(ty, _atom_type(ts))
    return ty


def _atom_type(ts: TokenStream) -> A.Type:
    if ts.accept("Real"):
        return A.Real
    if ts.accept("("):
        ty = _type(ts)
        ts.expect(")")
        return ty
    ts.error(f"expected a type, found {describe(ts.peek)}")


def parse_type(text: str) -> A.Type:
    ts = TokenStream(tokenize(text))
    ty = _type(ts)
    if ts.peek.kind != "eof":
        ts.error(f"unexpected {describe(ts.peek)} after type")
    return ty


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

class _TermParser:
    def __init__(self, ts: TokenStream, free: Iterable[str], registry):
        self.ts = ts
        self.free = frozenset(free)
        self.registry = registry

    def term(self, bound: frozenset[str]) -> A.Term:
        if self.ts.at("\\"):
            return self.lam(bound)
        return self.app(bound)

    def lam(self, bound: frozenset[str]) -> A.Term:
        self.ts.expect("\\")
        tok = self.ts.ident()
        if tok.text in TERM_KEYWORDS:
            self.ts.error(f"{tok.text!r} is reserved", tok)
        self.ts.expect(":")
        annot = _type(self.ts)
        self.ts.expect(".")
        body = self.term(bound | {tok.text})
        return A.Lam(tok.text, annot, body)

    def _starts_atom(self) -> bool:
        tok = self.ts.peek
        if tok.kind in ("num", "ident"):
            return tok.text != "Real"
        if tok.kind == "op":
            if tok.text in ("(", "<"):
                return True
            if tok.text == "-":
                nxt = self.ts.peek_at(1)
                return nxt.kind == "num" or nxt.text == "inf"
        return False

    def app(self, bound: frozenset[str]) -> A.Term:
        head = self.atom(bound)
        while True:
            if self.ts.at("\\"):
                return A.App(head, self.lam(bound))
            if not self._starts_atom():
                return head
            head = A.App(head, self.atom(bound))

    def atom(self, bound: frozenset[str]) -> A.Term:
        ts = self.ts
        tok = ts.peek
        if tok.kind == "num":
            ts.next()
            return A.Lit(float(tok.text))
        if ts.accept("-"):
            nxt = ts.next()
            if nxt.kind == "num":
                return A.Lit(-float(nxt.text))
            if nxt.text == "inf":
                return A.Lit(-math.inf)
            ts.error("expected a number after '-'", nxt)
        if ts.accept("("):
            t = self.term(bound)
            ts.expect(")")
            return t
        if ts.accept("<"):
            left = self.term(bound)
            ts.expect(",")
            right = self.term(bound)
            ts.expect(">")
            return A.Pair(left, right)
        if tok.kind != "ident":
            ts.error(f"expected a term, found {describe(tok)}")
        ts.next()
        name = tok.text
        if name == "fst":
            return A.Proj1()
        if name == "snd":
            return A.Proj2()
        if name == "inf":
            return A.Lit(math.inf)
        if name == "nan":
            return A.Lit(math.nan)
        if name in ("ifz", "iter"):
            ts.expect("(")
            a = self.term(bound)
            ts.expect(",")
            b = self.term(bound)
            ts.expect(")")
            return A.Ifz(a, b) if name == "ifz" else A.Iter(a, b)
        if name == "Real":
            ts.error("unexpected type name 'Real' in term", tok)
        if name in bound or name in self.free:
            return A.Var(name)
        if name in self.registry:
            return A.Prim(name, self.registry[name].arity)
        ts.error(f"unknown primitive {name!r}", tok)


def _term_parser(text: str, free: Iterable[str], registry) -> tuple[_TermParser, TokenStream]:
    from ..prims import resolve
    ts = TokenStream(tokenize(text))
    return _TermParser(ts, free, resolve(registry)), ts


def parse_term(text: str, *, free: Iterable[str] = (), registry=None) -> A.Term:
    """Parse a term.  Identifiers in ``free`` are read as free variables."""
    parser, ts = _term_parser(text, free, registry)
    t = parser.term(frozenset())
    if ts.peek.kind != "eof":
        ts.error(f"unexpected {describe(ts.peek)} after term")
    return t


# ---------------------------------------------------------------------------
# Difference expressions: raw syntax
# ---------------------------------------------------------------------------
# Raw nodes are tuples tagged by their first element and carry the token of
# their head for error positions.

class _DiffParser:
    def __init__(self, ts: TokenStream, registry):
        self.ts = ts
        self.registry = registry
        self.points: list[str] = []  # point binders in scope, for nf(...) bodies

    def expr(self):
        ts = self.ts
        if ts.at("dlam"):
            tok = ts.next()
            ts.expect("(")
            x = ts.ident()
            ts.expect(",")
            e = ts.ident()
            ts.expect(")")
            ts.expect(".")
            for name in (x, e):
                if name.text in DIFF_KEYWORDS:
                    ts.error(f"{name.text!r} is reserved", name)
            self.points.append(x.text)
            try:
                body = self.expr()
            finally:
                self.points.pop()
            return ("dlam", tok, x.text, e.text, body)
        return self.sum()

    def sum(self):
        left = self.prod()
        while self.ts.at("+") or self.ts.at("-"):
            tok = self.ts.next()
            left = ("bin", tok, tok.text, left, self.prod())
        return left

    def prod(self):
        left = self.unary()
        while self.ts.at("*") or self.ts.at("/"):
            tok = self.ts.next()
            left = ("bin", tok, tok.text, left, self.unary())
        return left

    def unary(self):
        ts = self.ts
        if ts.at("-"):
            tok = ts.next()
            if ts.peek.kind == "num":
                num = ts.next()
                return self.postfix_tail(("num", tok, -float(num.text)))
            if ts.at("inf"):
                ts.next()
                return self.postfix_tail(("num", tok, -math.inf))
            return ("neg", tok, self.unary())
        return self.postfix()

    def postfix(self):
        return self.postfix_tail(self.prefix())

    def postfix_tail(self, node):
        ts = self.ts
        while ts.at("@"):
            tok = ts.next()
            ts.expect("(")
            point = self.expr()
            ts.expect(",")
            diff = self.expr()
            ts.expect(")")
            node = ("at", tok, node, point, diff)
        return node

    def prefix(self):
        ts = self.ts
        if ts.at("dfst") or ts.at("dsnd"):
            tok = ts.next()
            return (tok.text, tok, self.prefix())
        return self.atom()

    def args(self) -> list:
        ts = self.ts
        ts.expect("(")
        out = []
        if not ts.at(")"):
            out.append(self.expr())
            while ts.accept(","):
                out.append(self.expr())
        ts.expect(")")
        return out

    def nf_term(self):
        ts = self.ts
        ts.expect("(")
        parser = _TermParser(ts, self.points, self.registry)
        t = parser.term(frozenset())
        ts.expect(")")
        return t

    def atom(self):
        ts = self.ts
        tok = ts.peek
        if tok.kind == "num":
            ts.next()
            return ("num", tok, float(tok.text))
        if ts.accept("("):
            node = self.expr()
            ts.expect(")")
            return node
        if ts.accept("<"):
            left = self.expr()
            ts.expect(",")
            right = self.expr()
            ts.expect(">")
            return ("pair", tok, left, right)
        if tok.kind != "ident":
            ts.error(f"expected a difference expression, found {describe(tok)}")
        ts.next()
        name = tok.text
        if name == "inf":
            return ("num", tok, math.inf)
        if name == "sup":
            ts.expect("{")
            items = []
            if not ts.at("}"):
                items.append(self.expr())
                while ts.accept(","):
                    items.append(self.expr())
            ts.expect("}")
            return ("sup", tok, items)
        if name == "nf":
            term = self.nf_term()
            args = self.args() if ts.at("(") else None
            return ("nf", tok, term, args)
        if name == "diam":
            ts.expect("(")
            prim = ts.ident()
            ts.expect(",")
            center = self.expr()
            ts.expect(",")
            radius = self.expr()
            ts.expect(")")
            return ("diam", tok, prim.text, center, radius)
        if name == "iterd":
            ts.expect("(")
            center = self.expr()
            ts.expect(",")
            radius = self.expr()
            ts.expect(",")
            ts.expect("nf")
            step = self.nf_term()
            ts.expect(",")
            ts.expect("nf")
            base = self.nf_term()
            parts = []
            for _ in range(3):
                ts.expect(",")
                parts.append(self.expr())
            ts.expect(")")
            return ("iterd", tok, center, radius, step, base, *parts)
        if name in ("abs", "real", "ifzd") or ts.at("("):
            return ("call", tok, name, self.args())
        return ("id", tok, name)


# ---------------------------------------------------------------------------
# Difference expressions: elaboration
# ---------------------------------------------------------------------------

def _fail(node, message: str):
    tok = node[1]
    raise SortError(f"{tok.line}:{tok.col}: {message}")


def _curried_real_arity(ty: A.Type) -> list[int] | None:
    """Argument groups for a first-order real function type, else None.

    ``Real -> Real -> Real`` gives ``[1, 1]`` and ``Real * Real -> Real`` gives
    ``[2]``.
    """
    groups = []
    while isinstance(ty, A.Arrow):
        n = _power_arity(ty.domain)
        if n is None:
            return None
        groups.append(n)
        ty = ty.codomain
    return groups if isinstance(ty, A.RealT) else None


def _power_arity(ty: A.Type) -> int | None:
    n = 1
    while isinstance(ty, A.Prod):
        if not isinstance(ty.right, A.RealT):
            return None
        n += 1
        ty = ty.left
    return n if isinstance(ty, A.RealT) else None


class _Elaborator:
    def __init__(self, registry):
        self.registry = registry

    # -- point expressions -------------------------------------------------

    def real(self, node, penv: Mapping[str, A.Type], denv: Mapping[str, A.Type]) -> A.RealExpr:
        kind = node[0]
        if kind == "num":
            return A.RLit(node[2])
        if kind == "neg":
            return A.Neg(self.real(node[2], penv, denv))
        if kind == "bin":
            return A.Arith(node[2], self.real(node[3], penv, denv), self.real(node[4], penv, denv))
        if kind == "id":
            name = node[2]
            if name in penv:
                if penv[name] != A.Real:
                    _fail(node, f"point variable {name!r} is not real-valued")
                return A.RPoint(name)
            if name in denv:
                if denv[name] != A.Real:
                    _fail(node, f"difference variable {name!r} is not a number")
                return A.RDiff(name)
            _fail(node, f"unbound name {name!r}")
        if kind == "call":
            name, args = node[2], node[3]
            if name == "real" and len(args) == 1:
                return self.real(args[0], penv, denv)
            if name in penv:
                groups = _curried_real_arity(penv[name])
                if groups is None or sum(groups) != len(args) or any(g != 1 for g in groups):
                    _fail(node, f"point variable {name!r} cannot be applied to {len(args)} reals")
                return A.PointApp(name, tuple(self.real(a, penv, denv) for a in args))
            if name in self.registry:
                arity = self.registry[name].arity
                if arity != len(args):
                    _fail(node, f"primitive {name!r} takes {arity} arguments, got {len(args)}")
                return A.PrimApp(name, tuple(self.real(a, penv, denv) for a in args))
            _fail(node, f"unknown function {name!r}")
        if kind == "nf":
            term, args = node[2], node[3]
            ty = self._type_of(node, term, penv)
            if args is None:
                if ty != A.Real:
                    _fail(node, "nf(...) without arguments must denote a real")
                return A.TermPoint(term)
            groups = _curried_real_arity(ty)
            if groups is None or sum(groups) != len(args):
                _fail(node, f"nf(...) cannot be applied to {len(args)} reals")
            return A.SemApp(term, tuple(self.real(a, penv, denv) for a in args))
        _fail(node, "expected a real-valued expression")

    def point(self, node, ty: A.Type, penv, denv) -> A.RealExpr:
        """A point argument of type ``ty``."""
        if ty == A.Real:
            return self.real(node, penv, denv)
        if node[0] == "id" and node[2] in penv:
            if penv[node[2]] != ty:
                _fail(node, f"point variable {node[2]!r} has the wrong type")
            return A.RPoint(node[2])
        if node[0] == "nf" and node[3] is None:
            if self._type_of(node, node[2], penv) != ty:
                _fail(node, "nf(...) has the wrong type for this point argument")
            return A.TermPoint(node[2])
        _fail(node, "higher-type point arguments must be point variables or nf(...)")

    def _type_of(self, node, term: A.Term, penv) -> A.Type:
        from ..typecheck import infer
        try:
            return infer(dict(penv), term, registry=self.registry)
        except StlrError as exc:
            _fail(node, f"ill-typed term in nf(...): {exc}")

    # -- differences -------------------------------------------------------

    def diff(self, node, expected: A.Type | None, penv, denv):
        """Return ``(DiffExpr, sort)``; ``expected`` may be None to synthesize."""
        d, sort = self._diff(node, expected, penv, denv)
        if expected is not None and sort != expected:
            _fail(node, f"sort mismatch: expected {_show(expected)}, found {_show(sort)}")
        return d, sort

    def _domain_of(self, point, diff, penv, denv) -> A.Type:
        try:
            return self.diff(diff, None, penv, denv)[1]
        except SortError:
            pass
        if point[0] == "nf" and point[3] is None:
            return self._type_of(point, point[2], penv)
        if point[0] == "id" and point[2] in penv:
            return penv[point[2]]
        return A.Real

    def _diff(self, node, expected, penv, denv):
        kind = node[0]
        real_ok = expected is None or expected == A.Real
        if kind == "num":
            v = node[2]
            if v < 0:
                _fail(node, "negative literal in a difference")
            return (A.Infinity() if v == math.inf else A.Const(v)), A.Real
        if kind == "id":
            name = node[2]
            if name in denv:
                return A.DiffVar(name), denv[name]
            if name in penv:
                if penv[name] != A.Real:
                    _fail(node, f"point variable {name!r} of higher type used as a difference")
                return A.PointVar(name), A.Real
            _fail(node, f"unbound name {name!r}")
        if kind == "dlam":
            if not isinstance(expected, A.Arrow):
                _fail(node, "dlam needs an arrow sort from context")
            _, _, x, e, body = node
            if x == e:
                _fail(node, "dlam binders must be distinct")
            penv2 = {k: v for k, v in penv.items() if k != e}
            penv2[x] = expected.domain
            denv2 = {k: v for k, v in denv.items() if k != x}
            denv2[e] = expected.domain
            b, _ = self.diff(body, expected.codomain, penv2, denv2)
            return A.DLam(x, e, b), expected
        if kind == "at":
            if node[2][0] == "dlam":
                # a literal dlam cannot synthesize its domain; read it off the arguments
                if expected is None:
                    _fail(node, "applied dlam needs its result sort from context")
                dom = self._domain_of(node[3], node[4], penv, denv)
                fun, fsort = self.diff(node[2], A.Arrow(dom, expected), penv, denv)
            else:
                fun, fsort = self.diff(node[2], None, penv, denv)
            if not isinstance(fsort, A.Arrow):
                _fail(node, "'@' applied to a non-function difference")
            pt = self.point(node[3], fsort.domain, penv, denv)
            dv, _ = self.diff(node[4], fsort.domain, penv, denv)
            return A.DApp(fun, pt, dv), fsort.codomain
        if kind == "pair":
            if expected is not None and not isinstance(expected, A.Prod):
                _fail(node, f"pair where {_show(expected)} was expected")
            l, ls = self.diff(node[2], expected.left if expected else None, penv, denv)
            r, rs = self.diff(node[3], expected.right if expected else None, penv, denv)
            return A.DPair(l, r), A.Prod(ls, rs)
        if kind in ("dfst", "dsnd"):
            arg, s = self.diff(node[2], None, penv, denv)
            if not isinstance(s, A.Prod):
                _fail(node, f"{kind} of a non-pair difference")
            if kind == "dfst":
                return A.DFst(arg), s.left
            return A.DSnd(arg), s.right
        if kind == "sup":
            items = node[2]
            if not items:
                if expected is None or expected == A.Real:
                    return A.FinSup(()), A.Real
                from ..diffspace import bottom_expr
                return bottom_expr(expected), expected
            first, sort = self.diff(items[0], expected, penv, denv)
            rest = [self.diff(i, sort, penv, denv)[0] for i in items[1:]]
            return A.FinSup((first, *rest)), sort
        if kind == "diam":
            _, _, prim, center, radius = node
            if prim not in self.registry:
                _fail(node, f"unknown primitive {prim!r}")
            dom = A.real_power(self.registry[prim].arity)
            c = self.point(center, dom, penv, denv)
            r, _ = self.diff(radius, dom, penv, denv)
            return A.PrimDiam(prim, c, r), A.Real
        if kind == "iterd":
            if expected is None:
                _fail(node, "iterd needs its sort from context")
            _, _, center, radius, step, base, dstep, dbase, dtop = node
            c = self.real(center, penv, denv)
            r, _ = self.diff(radius, A.Real, penv, denv)
            if self._type_of(node, step, penv) != A.Arrow(expected, expected):
                _fail(node, "iterd step has the wrong type")
            if self._type_of(node, base, penv) != expected:
                _fail(node, "iterd base has the wrong type")
            ds, _ = self.diff(dstep, A.Arrow(expected, expected), penv, denv)
            db, _ = self.diff(dbase, expected, penv, denv)
            dt, _ = self.diff(dtop, expected, penv, denv)
            return A.IterDiff(c, r, step, base, ds, db, dt), expected
        if kind == "call" and node[2] == "ifzd":
            args = node[3]
            if len(args) != 5:
                _fail(node, "ifzd takes five arguments")
            c = self.real(args[0], penv, denv)
            r, _ = self.diff(args[1], A.Real, penv, denv)
            neg, sort = self.diff(args[2], expected, penv, denv)
            nonneg, _ = self.diff(args[3], sort, penv, denv)
            top, _ = self.diff(args[4], sort, penv, denv)
            return A.IfzDiff(c, r, neg, nonneg, top), sort
        # everything else is a number
        if not real_ok:
            _fail(node, f"a number where {_show(expected)} was expected")
        if kind == "bin" and node[2] == "+":
            l, _ = self.diff(node[3], A.Real, penv, denv)
            r, _ = self.diff(node[4], A.Real, penv, denv)
            return A.Add(l, r), A.Real
        if kind == "call" and node[2] == "abs" and len(node[3]) == 1:
            return A.AbsReal(self.real(node[3][0], penv, denv)), A.Real
        if kind == "neg" and node[2][0] == "num":
            _fail(node, "negative literal in a difference")
        return A.Scalar(self.real(node, penv, denv)), A.Real


def _show(ty: A.Type) -> str:
    from .printer import print_type
    return print_type(ty)


def parse_diff(
    text: str,
    expected: A.Type,
    *,
    point_env: Mapping[str, A.Type] | None = None,
    diff_env: Mapping[str, A.Type] | None = None,
    registry=None,
) -> A.DiffExpr:
    """Parse a difference expression living in the difference space of ``expected``.

    ``point_env`` and ``diff_env`` type any free point and difference names.
    Syntax errors raise ParseError, sort errors raise SortError.
    """
    from ..prims import resolve
    reg = resolve(registry)
    ts = TokenStream(tokenize(text))
    parser = _DiffParser(ts, reg)
    parser.points.extend(point_env or ())
    raw = parser.expr()
    if ts.peek.kind != "eof":
        ts.error(f"unexpected {describe(ts.peek)} after difference expression")
    d, _ = _Elaborator(reg).diff(raw, expected, dict(point_env or {}), dict(diff_env or {}))
    return d


__all__ = ["parse_type", "parse_term", "parse_diff", "ParseError", "SortError"]
