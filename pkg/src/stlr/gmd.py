"""Generalized metric domains over finite quantales.

Everything here is finite and every law is decided by enumeration.  Objects
are triples (carrier, quantale, relation); arrows are pairs (f, zeta) with
``zeta : Q x A -> S``.  Identity, composition, the terminal object, binary
products and exponentials are built by the usual formulas, and
``check_quantale`` / ``check_gmd`` / ``check_arrow`` report each law with a
witness when it fails.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Sequence

from .errors import GmdError

SIZE_GUARD = 10**6


class Table:
    """A finite function, hashable and comparable by its graph."""

    __slots__ = ("keys", "values", "_index", "_hash")

    def __init__(self, keys: Sequence, values: Sequence):
        self.keys = tuple(keys)
        self.values = tuple(values)
        self._index = dict(zip(self.keys, self.values))
        self._hash = hash((self.keys, self.values))

    def __call__(self, *args):
        return self._index[args[0] if len(args) == 1 else args]

    def __eq__(self, other):
        return isinstance(other, Table) and self.keys == other.keys and self.values == other.values

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return "{" + ", ".join(f"{k!r}: {v!r}" for k, v in zip(self.keys, self.values)) + "}"

    def as_json(self):
        return [[_jsonable(k), _jsonable(v)] for k, v in zip(self.keys, self.values)]


def _jsonable(x):
    if isinstance(x, Table):
        return x.as_json()
    if isinstance(x, tuple):
        return [_jsonable(v) for v in x]
    return x


# ---------------------------------------------------------------------------
# Quantales
# ---------------------------------------------------------------------------


class Quantale:
    """A finite quantale.  ``signature`` decides structural equality."""

    def __init__(
        self,
        carrier: Iterable[Hashable],
        leq: Callable[[Any, Any], bool],
        mult: Callable[[Any, Any], Any],
        unit: Hashable,
        *,
        join: Callable[[Iterable], Any] | None = None,
        signature: Hashable | None = None,
        name: str = "Q",
    ):
        self.carrier = tuple(carrier)
        self.leq = leq
        self.mult = mult
        self.unit = unit
        self._join = join
        self.signature = signature if signature is not None else ("anon", id(self))
        self.name = name

    def __eq__(self, other):
        return isinstance(other, Quantale) and self.signature == other.signature

    def __hash__(self):
        return hash(self.signature)

    def __repr__(self):
        return f"Quantale({self.name}, |Q|={len(self.carrier)})"

    def __len__(self):
        return len(self.carrier)

    def join(self, xs: Iterable) -> Any:
        """Least upper bound, found by enumeration unless a join was supplied."""
        xs = list(xs)
        if self._join is not None:
            return self._join(xs)
        return _lub(self.carrier, self.leq, xs)

    @property
    def bottom(self):
        return self.join([])


def _lub(carrier, leq, xs):
    ubs = [u for u in carrier if all(leq(x, u) for x in xs)]
    least = [u for u in ubs if all(leq(u, v) for v in ubs)]
    if len(least) != 1:
        raise GmdError(f"no least upper bound for {xs!r}")
    return least[0]


def chain_quantale(n: int) -> Quantale:
    """The chain 0 < 1 < ... < n-1 with truncated addition; n-1 plays infinity."""
    if n < 1:
        raise GmdError("a chain quantale needs at least one element")
    top = n - 1
    return Quantale(
        range(n),
        lambda a, b: a <= b,
        lambda a, b: min(a + b, top),
        0,
        join=lambda xs: max(xs, default=0),
        signature=("chain", n),
        name=f"chain{n}",
    )


def table_quantale(carrier: Sequence, leq_pairs: Iterable, mult_table: dict, unit, name: str = "Q") -> Quantale:
    """A quantale given by explicit order pairs and a multiplication table."""
    order = frozenset((a, b) for a, b in leq_pairs) | {(a, a) for a in carrier}
    table = dict(mult_table)
    for (a, b), c in list(table.items()):
        table.setdefault((b, a), c)
    sig = ("table", tuple(carrier), tuple(sorted(map(repr, order))),
           tuple(sorted((repr(k), repr(v)) for k, v in table.items())), unit)

    def mult(a, b):
        try:
            return table[a, b]
        except KeyError:
            raise GmdError(f"multiplication undefined at {(a, b)!r}") from None

    return Quantale(carrier, lambda a, b: (a, b) in order, mult, unit, signature=sig, name=name)


def product_quantale(q: Quantale, s: Quantale) -> Quantale:
    return Quantale(
        itertools.product(q.carrier, s.carrier),
        lambda x, y: q.leq(x[0], y[0]) and s.leq(x[1], y[1]),
        lambda x, y: (q.mult(x[0], y[0]), s.mult(x[1], y[1])),
        (q.unit, s.unit),
        join=lambda xs: (q.join(x[0] for x in xs), s.join(x[1] for x in xs)),
        signature=("prod", q.signature, s.signature),
        name=f"({q.name} x {s.name})",
    )


def exponential_quantale(t: Quantale, keys: Sequence, guard: int = SIZE_GUARD) -> Quantale:
    """Pointwise quantale of all functions ``keys -> T``."""
    keys = tuple(keys)
    size = len(t.carrier) ** len(keys)
    if size > guard:
        raise GmdError(f"exponential quantale would have {size} elements (guard {guard})")
    carrier = [Table(keys, vs) for vs in itertools.product(t.carrier, repeat=len(keys))]
    return Quantale(
        carrier,
        lambda f, g: all(t.leq(a, b) for a, b in zip(f.values, g.values)),
        lambda f, g: Table(keys, [t.mult(a, b) for a, b in zip(f.values, g.values)]),
        Table(keys, [t.unit] * len(keys)),
        join=lambda fs: Table(keys, [t.join(f.values[i] for f in fs) for i in range(len(keys))]),
        signature=("exp", t.signature, keys),
        name=f"{t.name}^{len(keys)}",
    )


# ---------------------------------------------------------------------------
# Law reports
# ---------------------------------------------------------------------------


@dataclass
class LawResult:
    name: str
    passed: bool
    checked: int
    witness: Any = None

    def to_json(self) -> dict:
        return {"law": self.name, "passed": self.passed, "checked": self.checked,
                "witness": _jsonable(self.witness)}


@dataclass
class LawReport:
    subject: str
    results: list[LawResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def __getitem__(self, name: str) -> LawResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def failures(self) -> list[LawResult]:
        return [r for r in self.results if not r.passed]

    def to_json(self) -> dict:
        return {"subject": self.subject, "passed": self.passed,
                "laws": [r.to_json() for r in self.results]}


def _law(name: str, instances: Iterable, holds: Callable) -> LawResult:
    n = 0
    for inst in instances:
        n += 1
        if not holds(*inst):
            return LawResult(name, False, n, inst)
    return LawResult(name, True, n)


def check_quantale(q: Quantale, *, subset_limit: int = 8) -> LawReport:
    """Exhaustively check the quantale axioms on a finite carrier.

    Distributivity is checked over binary joins, and over every non-empty
    subset when the carrier has at most ``subset_limit`` elements.  Empty joins
    are excluded: with bottom equal to the unit, ``a * bottom = a``.
    """
    C = q.carrier
    rep = LawReport(f"quantale {q.name}")
    pairs = list(itertools.product(C, repeat=2))
    triples = itertools.product(C, repeat=3)
    rep.results.append(_law("order_reflexive", ((a,) for a in C), lambda a: q.leq(a, a)))
    rep.results.append(_law(
        "order_antisymmetric", pairs,
        lambda a, b: not (q.leq(a, b) and q.leq(b, a)) or a == b))
    rep.results.append(_law(
        "order_transitive", itertools.product(C, repeat=3),
        lambda a, b, c: not (q.leq(a, b) and q.leq(b, c)) or q.leq(a, c)))

    def has_join(*xs):
        try:
            _lub(C, q.leq, xs)
        except GmdError:
            return False
        return True

    rep.results.append(_law("complete_lattice", [()] + pairs, has_join))
    if not rep.passed:
        return rep
    members = set(C)
    rep.results.append(_law("mult_closed", pairs, lambda a, b: q.mult(a, b) in members))
    if not rep.passed:
        return rep
    rep.results.append(_law("commutative", pairs, lambda a, b: q.mult(a, b) == q.mult(b, a)))
    rep.results.append(_law(
        "associative", triples,
        lambda a, b, c: q.mult(q.mult(a, b), c) == q.mult(a, q.mult(b, c))))
    rep.results.append(_law("unit", ((a,) for a in C), lambda a: q.mult(q.unit, a) == a))

    def distributes(a, xs):
        return q.mult(a, _lub(C, q.leq, xs)) == _lub(C, q.leq, [q.mult(a, x) for x in xs])

    if len(C) <= subset_limit:
        subsets = [s for k in range(1, len(C) + 1) for s in itertools.combinations(C, k)]
    else:
        subsets = [s for k in (1, 2) for s in itertools.combinations(C, k)]
    rep.results.append(_law("join_distributive", itertools.product(C, subsets), distributes))
    return rep


# ---------------------------------------------------------------------------
# Objects and arrows
# ---------------------------------------------------------------------------


class GmdObject:
    def __init__(self, carrier: Iterable, quantale: Quantale, delta: Iterable, *,
                 name: str = "A", factors: tuple | None = None, exponent: tuple | None = None):
        self.carrier = tuple(carrier)
        self.quantale = quantale
        self.delta = frozenset(tuple(t) for t in delta)
        self.name = name
        self.factors = factors
        self.exponent = exponent
        self._by_pair: dict | None = None

    def __eq__(self, other):
        return (isinstance(other, GmdObject) and self.carrier == other.carrier
                and self.quantale == other.quantale and self.delta == other.delta)

    def __hash__(self):
        return hash((self.carrier, self.quantale, len(self.delta)))

    def __repr__(self):
        return f"GmdObject({self.name}, |A|={len(self.carrier)}, {self.quantale.name})"

    def holds(self, x, q, y) -> bool:
        return (x, q, y) in self.delta

    def distances(self, x, y) -> frozenset:
        if self._by_pair is None:
            idx: dict = {}
            for a, q, b in self.delta:
                idx.setdefault((a, b), set()).add(q)
            self._by_pair = {k: frozenset(v) for k, v in idx.items()}
        return self._by_pair.get((x, y), frozenset())


def discrete_object(carrier: Iterable, quantale: Quantale, name: str = "A") -> GmdObject:
    carrier = tuple(carrier)
    return GmdObject(carrier, quantale, [(a, quantale.unit, a) for a in carrier], name=name)


def check_gmd(o: GmdObject, *, guard: int = SIZE_GUARD) -> LawReport:
    """Exhaustively check the three axioms (triangularity with middle self-distance).

    Refuses with GmdError when triangularity would take more than ``guard`` steps.
    """
    q = o.quantale
    rep = LawReport(f"object {o.name}")
    points, values = set(o.carrier), set(q.carrier)
    rep.results.append(_law(
        "well_formed", sorted(o.delta, key=repr),
        lambda x, d, y: x in points and y in points and d in values))
    if not rep.passed:
        return rep
    rep.results.append(_law(
        "indistancy", ((x, y) for x in o.carrier for y in o.carrier),
        lambda x, y: q.unit not in o.distances(x, y) or x == y))
    rep.results.append(_law("symmetry", o.delta, lambda x, d, y: o.holds(y, d, x)))

    work = triangularity_work(o)
    if work > guard:
        raise GmdError(f"triangularity needs about {work} steps, above the guard of {guard}")

    def tri_instances():
        # d * e only matters through its value, so each product is kept once
        for x in o.carrier:
            for y in o.carrier:
                ds = o.distances(x, y)
                es = o.distances(y, y)
                if not ds or not es:
                    continue
                prods: dict = {}
                for d in ds:
                    for e in es:
                        prods.setdefault(q.mult(d, e), (d, e))
                for z in o.carrier:
                    for f in o.distances(y, z):
                        for p, (d, e) in prods.items():
                            yield x, d, y, e, f, z, q.mult(p, f)

    rep.results.append(_law("triangularity", tri_instances(),
                            lambda x, d, y, e, f, z, s: o.holds(x, s, z)))
    return rep


def triangularity_work(o: GmdObject) -> int:
    """Upper bound on the steps ``check_gmd`` spends on triangularity."""
    nq = len(o.quantale.carrier)
    total = 0
    for x in o.carrier:
        for y in o.carrier:
            k = len(o.distances(x, y)) * len(o.distances(y, y))
            if not k:
                continue
            total += k + min(nq, k) * sum(len(o.distances(y, z)) for z in o.carrier)
    return total


@dataclass(frozen=True)
class GmdArrow:
    src: GmdObject
    dst: GmdObject
    f: Callable
    zeta: Callable
    name: str = "f"

    def __repr__(self):
        return f"GmdArrow({self.name}: {self.src.name} -> {self.dst.name})"


def check_arrow(a: GmdArrow) -> LawReport:
    """The map lands in the target and both conclusions of the arrow condition hold."""
    src, dst = a.src, a.dst
    rep = LawReport(f"arrow {a.name}")
    points, values = set(dst.carrier), set(dst.quantale.carrier)
    rep.results.append(_law("maps_into", ((x,) for x in src.carrier), lambda x: a.f(x) in points))
    rep.results.append(_law(
        "zeta_into", itertools.product(src.quantale.carrier, src.carrier),
        lambda q, x: a.zeta(q, x) in values))
    if not rep.passed:
        return rep
    rep.results.append(_law(
        "arrow_condition", sorted(src.delta, key=repr),
        lambda x, q, y: dst.holds(a.f(x), a.zeta(q, x), a.f(y))
        and dst.holds(a.f(x), a.zeta(q, y), a.f(y))))
    return rep


def arrows_equal(g: GmdArrow, h: GmdArrow) -> LawResult:
    """Pointwise equality of both components on the whole source."""
    if g.src != h.src or g.dst != h.dst:
        return LawResult("equal", False, 0, ("type", g.name, h.name))
    res = _law("equal_f", ((x,) for x in g.src.carrier), lambda x: g.f(x) == h.f(x))
    if not res.passed:
        return res
    res2 = _law("equal_zeta", itertools.product(g.src.quantale.carrier, g.src.carrier),
                lambda q, x: g.zeta(q, x) == h.zeta(q, x))
    return LawResult("equal", res2.passed, res.checked + res2.checked, res2.witness)


def tabulate(a: GmdArrow) -> GmdArrow:
    """Freeze an arrow's components into lookup tables."""
    xs = a.src.carrier
    qx = list(itertools.product(a.src.quantale.carrier, xs))
    f = Table(xs, [a.f(x) for x in xs])
    z = Table(qx, [a.zeta(q, x) for q, x in qx])
    return GmdArrow(a.src, a.dst, f, lambda q, x: z(q, x), a.name)


# ---------------------------------------------------------------------------
# Category structure
# ---------------------------------------------------------------------------


def gmd_id(o: GmdObject) -> GmdArrow:
    return GmdArrow(o, o, lambda a: a, lambda q, a: q, f"id_{o.name}")


def gmd_compose(g: GmdArrow, f: GmdArrow) -> GmdArrow:
    """``g . f``: first f, then g."""
    if f.dst != g.src:
        raise GmdError(f"cannot compose {g.name} after {f.name}: carriers differ")
    return GmdArrow(
        f.src, g.dst,
        lambda a: g.f(f.f(a)),
        lambda q, a: g.zeta(f.zeta(q, a), f.f(a)),
        f"{g.name}.{f.name}",
    )


STAR = "*"


def gmd_terminal() -> GmdObject:
    one = Quantale([0], lambda a, b: True, lambda a, b: 0, 0, signature=("one",), name="O")
    return GmdObject([STAR], one, [(STAR, 0, STAR)], name="1")


def gmd_bang(o: GmdObject) -> GmdArrow:
    """The unique arrow into the terminal object."""
    return GmdArrow(o, gmd_terminal(), lambda a: STAR, lambda q, a: 0, f"!_{o.name}")


@dataclass(frozen=True)
class Product:
    obj: GmdObject
    proj1: GmdArrow
    proj2: GmdArrow

    def pair(self, f: GmdArrow, g: GmdArrow) -> GmdArrow:
        """The mediating arrow <f, g>."""
        a, b = self.obj.factors
        if f.src != g.src or f.dst != a or g.dst != b:
            raise GmdError("pairing needs arrows C -> A and C -> B with a common source")
        return GmdArrow(
            f.src, self.obj,
            lambda c: (f.f(c), g.f(c)),
            lambda t, c: (f.zeta(t, c), g.zeta(t, c)),
            f"<{f.name},{g.name}>",
        )


def gmd_product(a: GmdObject, b: GmdObject) -> Product:
    qs = product_quantale(a.quantale, b.quantale)
    delta = [
        ((x, y), (q, s), (x2, y2))
        for x, q, x2 in a.delta for y, s, y2 in b.delta
    ]
    obj = GmdObject(itertools.product(a.carrier, b.carrier), qs, delta,
                    name=f"({a.name} x {b.name})", factors=(a, b))
    p1 = GmdArrow(obj, a, lambda ab: ab[0], lambda qs_, ab: qs_[0], f"pi1")
    p2 = GmdArrow(obj, b, lambda ab: ab[1], lambda qs_, ab: qs_[1], f"pi2")
    return Product(obj, p1, p2)


def gmd_arrow_product(f: GmdArrow, g: GmdArrow) -> GmdArrow:
    """``f x g`` between the constructed products."""
    src = gmd_product(f.src, g.src).obj
    dst = gmd_product(f.dst, g.dst).obj
    return GmdArrow(
        src, dst,
        lambda ab: (f.f(ab[0]), g.f(ab[1])),
        lambda qs, ab: (f.zeta(qs[0], ab[0]), g.zeta(qs[1], ab[1])),
        f"({f.name} x {g.name})",
    )


@dataclass(frozen=True)
class Exponential:
    obj: GmdObject
    eval_arrow: GmdArrow
    base: GmdObject
    target: GmdObject

    def curry(self, g: GmdArrow) -> GmdArrow:
        """Transpose ``g : A x B -> C`` into ``A -> C^B``."""
        if g.src.factors is None or g.src.factors[1] != self.base or g.dst != self.target:
            raise GmdError("curry needs an arrow A x B -> C for this exponential")
        a = g.src.factors[0]
        B = self.base.carrier
        keys = self.obj.exponent
        return GmdArrow(
            a, self.obj,
            lambda x: Table(B, [g.f((x, b)) for b in B]),
            lambda q, x: Table(keys, [g.zeta((q, s), (x, b)) for s, b in keys]),
            f"curry({g.name})",
        )


def exponential_size(b: GmdObject, c: GmdObject) -> int:
    """Number of (f, d, f') instances the exponential relation enumerates."""
    fs = len(c.carrier) ** len(b.carrier)
    ds = len(c.quantale.carrier) ** (len(b.quantale.carrier) * len(b.carrier))
    return fs * fs * ds


def gmd_exponential(b: GmdObject, c: GmdObject, *, guard: int = SIZE_GUARD) -> Exponential:
    """The exponential ``C^B`` with the pointwise function quantale ``T^(S x B)``."""
    size = exponential_size(b, c)
    if size > guard:
        raise GmdError(f"exponential needs {size} law instances, above the guard of {guard}")
    B = b.carrier
    keys = tuple(itertools.product(b.quantale.carrier, B))
    tq = exponential_quantale(c.quantale, keys, guard)
    funcs = [Table(B, vs) for vs in itertools.product(c.carrier, repeat=len(B))]
    pos = {k: i for i, k in enumerate(keys)}
    rho = sorted(b.delta, key=repr)
    delta = []
    for f in funcs:
        for g in funcs:
            # nu^rho(f, d, g) constrains each coordinate of d independently
            allowed = [set(c.quantale.carrier) for _ in keys]
            for x, s, y in rho:
                ok = c.distances(f(x), g(y))
                allowed[pos[s, x]] &= ok
                allowed[pos[s, y]] &= ok
            if any(not a for a in allowed):
                continue
            ordered = [[t for t in c.quantale.carrier if t in a] for a in allowed]
            for vs in itertools.product(*ordered):
                delta.append((f, Table(keys, vs), g))
    obj = GmdObject(funcs, tq, delta, name=f"{c.name}^{b.name}", exponent=keys)
    prod = gmd_product(obj, b)
    ev = GmdArrow(
        prod.obj, c,
        lambda fb: fb[0](fb[1]),
        lambda ds, fb: ds[0](ds[1], fb[1]),
        "eval",
    )
    return Exponential(obj, ev, b, c)


# ---------------------------------------------------------------------------
# Enumeration helpers for law suites
# ---------------------------------------------------------------------------


def all_arrows(src: GmdObject, dst: GmdObject, limit: int = 10_000) -> list[GmdArrow]:
    """Every valid arrow ``src -> dst``, refusing when there are too many candidates."""
    A, Q = src.carrier, src.quantale.carrier
    qa = list(itertools.product(Q, A))
    n = len(dst.carrier) ** len(A) * len(dst.quantale.carrier) ** len(qa)
    if n > limit:
        raise GmdError(f"{n} candidate arrows exceed the limit of {limit}")
    out = []
    for fv in itertools.product(dst.carrier, repeat=len(A)):
        f = Table(A, fv)
        for zv in itertools.product(dst.quantale.carrier, repeat=len(qa)):
            z = Table(qa, zv)
            arr = GmdArrow(src, dst, f, lambda q, a, z=z: z(q, a), f"{src.name}->{dst.name}#{len(out)}")
            if check_arrow(arr).passed:
                out.append(arr)
    return out


def bundled_objects() -> list[GmdObject]:
    """Small objects used by the law suite: carriers of at most 3, chains of at most 4."""
    c2, c3, c4 = chain_quantale(2), chain_quantale(3), chain_quantale(4)
    return [
        discrete_object(["a"], c2, "D1"),
        discrete_object(["a", "b"], c2, "D2"),
        # points at distance >= 1 from themselves and >= 2 from each other
        GmdObject(
            ["p", "q"], c3,
            [(x, d, y) for x in "pq" for y in "pq" for d in range(3) if d >= (1 if x == y else 2)],
            name="P2",
        ),
        # three points on a line, distance |i - j| truncated, self-distance anything
        GmdObject(
            [0, 1, 2], c4,
            [(i, d, j) for i in range(3) for j in range(3) for d in range(4)
             if d >= abs(i - j) and (i == j or d > 0)],
            name="L3",
        ),
        GmdObject(["u"], c4, [("u", d, "u") for d in range(1, 4)], name="U1"),
    ]


def spaced(items: Sequence, k: int) -> list:
    """At most ``k`` items picked at evenly spaced positions, ends included."""
    items = list(items)
    if len(items) <= k:
        return items
    if k == 1:
        return items[:1]
    step = (len(items) - 1) / (k - 1)
    return [items[round(i * step)] for i in range(k)]


# ---------------------------------------------------------------------------
# Law suite
# ---------------------------------------------------------------------------


def _equal_law(name: str, pairs: Iterable[tuple[GmdArrow, GmdArrow]]) -> LawResult:
    n = 0
    for lhs, rhs in pairs:
        res = arrows_equal(lhs, rhs)
        n += res.checked
        if not res.passed:
            return LawResult(name, False, n, {"lhs": lhs.name, "rhs": rhs.name, "at": res.witness})
    return LawResult(name, True, n)


def _valid_law(name: str, arrows: Iterable[GmdArrow]) -> LawResult:
    n = 0
    for a in arrows:
        rep = check_arrow(a)
        n += sum(r.checked for r in rep.results)
        if not rep.passed:
            bad = rep.failures()[0]
            return LawResult(name, False, n, {"arrow": a.name, "law": bad.name, "at": bad.witness})
    return LawResult(name, True, n)


def _report_law(name: str, reports: Iterable[LawReport]) -> LawResult:
    n = 0
    for rep in reports:
        n += sum(r.checked for r in rep.results)
        if not rep.passed:
            bad = rep.failures()[0]
            return LawResult(name, False, n, {"subject": rep.subject, "law": bad.name, "at": bad.witness})
    return LawResult(name, True, n)


def law_suite(
    objects: Sequence[GmdObject],
    arrows: Sequence[GmdArrow],
    *,
    guard: int = SIZE_GUARD,
    products: bool = True,
    exponentials: bool = True,
    curry_arrows: Sequence[GmdArrow] | None = None,
) -> LawReport:
    """Check every law of the cartesian closed structure on the given instances.

    Category laws use the listed arrows; product laws use every ordered pair
    of objects; exponential laws use every pair within ``guard`` together with
    the arrows whose source is a constructed product, taken from
    ``curry_arrows`` when given and from ``arrows`` otherwise.
    """
    rep = LawReport("law suite")
    quantales = list({o.quantale.signature: o.quantale for o in objects}.values())
    rep.results.append(_report_law("quantale_axioms", (check_quantale(q) for q in quantales)))
    rep.results.append(_report_law("object_axioms", (check_gmd(o, guard=guard) for o in objects)))
    rep.results.append(_valid_law("arrow_condition", arrows))

    by_src: dict = {}
    for a in arrows:
        by_src.setdefault(a.src, []).append(a)
    rep.results.append(_equal_law("identity_left", ((gmd_compose(gmd_id(a.dst), a), a) for a in arrows)))
    rep.results.append(_equal_law("identity_right", ((gmd_compose(a, gmd_id(a.src)), a) for a in arrows)))
    composable = [(g, f) for f in arrows for g in by_src.get(f.dst, [])]
    rep.results.append(_valid_law("composite_is_arrow", (gmd_compose(g, f) for g, f in composable)))
    rep.results.append(_equal_law("associativity", (
        (gmd_compose(gmd_compose(h, g), f), gmd_compose(h, gmd_compose(g, f)))
        for g, f in composable for h in by_src.get(g.dst, [])
    )))

    term = gmd_terminal()
    rep.results.append(_report_law("terminal_axioms", [check_gmd(term)]))
    rep.results.append(_law(
        "terminal_unique", ((o.name, o) for o in objects),
        lambda _, o: len(all_arrows(o, term)) == 1 and check_arrow(gmd_bang(o)).passed,
    ))

    if products:
        prods = {(a, b): gmd_product(a, b) for a in objects for b in objects}
        rep.results.append(_report_law("product_axioms", (check_gmd(p.obj, guard=guard) for p in prods.values())))
        rep.results.append(_valid_law("projections", (x for p in prods.values() for x in (p.proj1, p.proj2))))
        pairs = [
            (prods[f.dst, g.dst], f, g)
            for f in arrows for g in by_src.get(f.src, [])
            if (f.dst, g.dst) in prods
        ]
        rep.results.append(_valid_law("pairing_is_arrow", (p.pair(f, g) for p, f, g in pairs)))
        rep.results.append(_equal_law("product_beta", (
            law for p, f, g in pairs
            for law in ((gmd_compose(p.proj1, p.pair(f, g)), f), (gmd_compose(p.proj2, p.pair(f, g)), g))
        )))

    if exponentials:
        exps = []
        for b in objects:
            for c in objects:
                if exponential_size(b, c) > guard:
                    continue
                e = gmd_exponential(b, c, guard=guard)
                if triangularity_work(e.obj) <= guard:
                    exps.append(e)
        rep.results.append(_report_law("exponential_axioms", (check_gmd(e.obj, guard=guard) for e in exps)))
        rep.results.append(_valid_law("eval_is_arrow", (e.eval_arrow for e in exps)))
        betas = [
            (e, g) for e in exps for g in (arrows if curry_arrows is None else curry_arrows)
            if g.src.factors is not None and g.src.factors[1] == e.base and g.dst == e.target
        ]
        rep.results.append(_valid_law("curry_is_arrow", (e.curry(g) for e, g in betas)))
        rep.results.append(_equal_law("exponential_beta", (
            (gmd_compose(e.eval_arrow, gmd_arrow_product(e.curry(g), gmd_id(e.base))), g)
            for e, g in betas
        )))
    return rep


def bundled_arrows(objects: Sequence[GmdObject] | None = None, per_pair: int = 6) -> list[GmdArrow]:
    """A deterministic selection of valid arrows among the small bundled objects."""
    if objects is None:
        objects = [o for o in bundled_objects() if len(o.carrier) <= 2 and len(o.quantale) <= 4][:2]
        objects += [o for o in bundled_objects() if o.name == "U1"]
    out = []
    for a in objects:
        for b in objects:
            out.extend(tabulate(x) for x in spaced(all_arrows(a, b), per_pair))
    return out


# ---------------------------------------------------------------------------
# Instance files
# ---------------------------------------------------------------------------


def _freeze(x):
    return tuple(_freeze(v) for v in x) if isinstance(x, list) else x


def load_instances(doc: dict) -> tuple[dict, dict, dict]:
    """Build quantales, objects and arrows from a parsed TOML document.

    ``[quantale.NAME]`` takes ``chain = n`` or ``carrier``/``leq``/``mult``/``unit``
    tables; ``[object.NAME]`` takes ``carrier``, ``quantale`` and either
    ``delta`` triples or ``discrete = true``; ``[arrow.NAME]`` takes ``src``
    (a name, or a two-element list for a product), ``dst``, ``map`` pairs and
    ``zeta`` triples ``[q, a, s]``.
    """
    quantales: dict[str, Quantale] = {}
    for name, spec in doc.get("quantale", {}).items():
        if "chain" in spec:
            quantales[name] = chain_quantale(int(spec["chain"]))
            continue
        try:
            carrier = [_freeze(c) for c in spec["carrier"]]
            mult = {(_freeze(a), _freeze(b)): _freeze(c) for a, b, c in spec["mult"]}
            leq = [(_freeze(a), _freeze(b)) for a, b in spec.get("leq", [])]
            quantales[name] = table_quantale(carrier, leq, mult, _freeze(spec["unit"]), name)
        except (KeyError, ValueError, TypeError) as exc:
            raise GmdError(f"quantale {name!r}: malformed table ({exc})") from None
    objects: dict[str, GmdObject] = {}
    for name, spec in doc.get("object", {}).items():
        try:
            q = quantales[spec["quantale"]]
            carrier = [_freeze(c) for c in spec["carrier"]]
        except KeyError as exc:
            raise GmdError(f"object {name!r}: missing or unknown {exc}") from None
        if spec.get("discrete"):
            objects[name] = discrete_object(carrier, q, name)
        else:
            delta = [tuple(_freeze(v) for v in t) for t in spec.get("delta", [])]
            objects[name] = GmdObject(carrier, q, delta, name=name)

    def obj(ref):
        if isinstance(ref, list):
            if len(ref) != 2:
                raise GmdError("a product source names exactly two objects")
            return gmd_product(obj(ref[0]), obj(ref[1])).obj
        if ref not in objects:
            raise GmdError(f"unknown object {ref!r}")
        return objects[ref]

    arrows: dict[str, GmdArrow] = {}
    for name, spec in doc.get("arrow", {}).items():
        try:
            src, dst = obj(spec["src"]), obj(spec["dst"])
            fmap = {_freeze(a): _freeze(b) for a, b in spec["map"]}
            zmap = {(_freeze(q), _freeze(a)): _freeze(s) for q, a, s in spec["zeta"]}
        except (KeyError, ValueError, TypeError) as exc:
            raise GmdError(f"arrow {name!r}: malformed ({exc})") from None
        missing = [x for x in src.carrier if x not in fmap]
        missing += [(q, x) for q in src.quantale.carrier for x in src.carrier if (q, x) not in zmap]
        if missing:
            raise GmdError(f"arrow {name!r} is undefined at {missing[0]!r}")
        arrows[name] = GmdArrow(src, dst, fmap.__getitem__, lambda q, a, z=zmap: z[q, a], name)
    return quantales, objects, arrows
