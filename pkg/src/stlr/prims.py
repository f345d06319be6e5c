"""Registry of primitive real functions.

Each entry pairs a binary64 evaluator with a sound interval extension, a
weak-boundedness flag and an optional Lipschitz constant.  The registry is read
from a TOML file; the bundled ``prims.toml`` is used unless ``STLR_PRIMS`` or an
explicit path says otherwise.
"""

from __future__ import annotations

import inspect
import math
import os
import random
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Iterator, Mapping, Sequence

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from .errors import RegistryError
from .interval import ENTIRE, INF, Interval, iexp, icos, isin, mul_up, add_up


def _recip(x: float) -> float:
    # total at 0 so that the function is defined everywhere
    return 0.0 if x == 0.0 else 1.0 / x


def _div(x: float, y: float) -> float:
    return 0.0 if y == 0.0 else x / y


def _exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return INF


def _recip_iv(x: Interval) -> Interval:
    r = x.recip()
    # the value at 0 is 0, which the unbounded enclosure already covers
    return r


def _div_iv(x: Interval, y: Interval) -> Interval:
    q = x / y
    return q.hull(Interval.point(0.0)) if y.contains(0.0) else q


_ONE = Interval.point(1.0)
_TWO = Interval.point(2.0)

EVALUATORS: dict[str, Callable[..., float]] = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": _exp,
    "add1": lambda x: x + 1.0,
    "pred": lambda x: x - 1.0,
    "mul2": lambda x: 2.0 * x,
    "neg": lambda x: -x,
    "abs": abs,
    "add": lambda x, y: x + y,
    "sub": lambda x, y: x - y,
    "mul": lambda x, y: x * y,
    "recip": _recip,
    "div": _div,
}

INTERVALS: dict[str, Callable[..., Interval]] = {
    "sin": isin,
    "cos": icos,
    "exp": iexp,
    "add1": lambda x: x + _ONE,
    "pred": lambda x: x - _ONE,
    "mul2": lambda x: x * _TWO,
    "neg": lambda x: -x,
    "abs": abs,
    "add": lambda x, y: x + y,
    "sub": lambda x, y: x - y,
    "mul": lambda x, y: x * y,
    "recip": _recip_iv,
    "div": _div_iv,
}


@dataclass(frozen=True)
class PrimSpec:
    name: str
    arity: int
    eval: Callable[..., float]
    interval_ext: Callable[..., Interval]
    weak_bounded: bool
    lipschitz: float | None = None

    def __call__(self, *args: float) -> float:
        return self.eval(*args)

    def enclose(self, box: Sequence[Interval]) -> Interval:
        if len(box) != self.arity:
            raise RegistryError(f"{self.name} expects {self.arity} arguments, got {len(box)}")
        if not all(iv.is_bounded for iv in box):
            # enclosures of unbounded boxes are not needed anywhere; be safe
            return ENTIRE
        return self.interval_ext(*box)


class Registry(Mapping[str, PrimSpec]):
    def __init__(self, specs: Sequence[PrimSpec], source: str = "<memory>"):
        self._specs = {p.name: p for p in specs}
        self.source = source

    def __getitem__(self, name: str) -> PrimSpec:
        try:
            return self._specs[name]
        except KeyError:
            raise RegistryError(f"unknown primitive {name!r}") from None

    def __iter__(self) -> Iterator[str]:
        return iter(self._specs)

    def __len__(self) -> int:
        return len(self._specs)

    def __contains__(self, name: object) -> bool:
        return name in self._specs


def _arg_count(fn: Callable) -> int | None:
    try:
        return len(inspect.signature(fn).parameters)
    except (TypeError, ValueError):
        return None


def _spec_from_table(name: str, entry: Mapping) -> PrimSpec:
    try:
        arity = int(entry["arity"])
        ev = entry.get("eval", name)
        iv = entry.get("interval", ev)
        weak = bool(entry["weak_bounded"])
    except (KeyError, TypeError, ValueError) as exc:
        raise RegistryError(f"primitive {name!r}: malformed entry ({exc})") from None
    if arity < 1:
        raise RegistryError(f"primitive {name!r}: arity must be positive")
    if ev not in EVALUATORS:
        raise RegistryError(f"primitive {name!r}: unknown evaluator id {ev!r}")
    if iv not in INTERVALS:
        raise RegistryError(f"primitive {name!r}: unknown interval id {iv!r}")
    fn = EVALUATORS[ev]
    if _arg_count(fn) not in (None, arity):
        raise RegistryError(f"primitive {name!r}: evaluator {ev!r} does not take {arity} arguments")
    lip = entry.get("lipschitz")
    if lip is not None:
        lip = float(lip)
        if not lip >= 0:
            raise RegistryError(f"primitive {name!r}: lipschitz must be nonnegative")
    return PrimSpec(name, arity, fn, INTERVALS[iv], weak, lip)


def parse_registry(text: str, source: str = "<string>") -> Registry:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise RegistryError(f"{source}: {exc}") from None
    table = data.get("prims")
    if not isinstance(table, dict):
        raise RegistryError(f"{source}: missing [prims] table")
    specs = [_spec_from_table(name, entry) for name, entry in table.items()]
    return Registry(specs, source)


def load_registry(path: str | os.PathLike) -> Registry:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise RegistryError(f"cannot read primitive registry {p}: {exc.strerror}") from None
    return parse_registry(text, str(p))


_default: Registry | None = None
_default_key: str | None = None


def default_registry() -> Registry:
    """The bundled registry, or the file named by ``STLR_PRIMS``."""
    global _default, _default_key
    override = os.environ.get("STLR_PRIMS") or ""
    if _default is None or _default_key != override:
        if override:
            _default = load_registry(override)
        else:
            text = resources.files("stlr").joinpath("prims.toml").read_text(encoding="utf-8")
            _default = parse_registry(text, "prims.toml")
        _default_key = override
    return _default


def resolve(registry: Registry | None) -> Registry:
    return default_registry() if registry is None else registry


def prim_diameter(p: PrimSpec, center, radius) -> float:
    """Upper bound on the diameter of ``p`` over a box around ``center``.

    ``center`` and ``radius`` are floats for unary primitives and may be
    sequences (one entry per argument) for n-ary ones; a scalar radius is shared
    by all coordinates.  The result is ``inf`` when any radius is infinite or the
    enclosure is unbounded.
    """
    centers = tuple(center) if isinstance(center, (tuple, list)) else (center,)
    if isinstance(radius, (tuple, list)):
        radii = tuple(float(r) for r in radius)
    else:
        radii = (float(radius),) * len(centers)
    if len(centers) != p.arity or len(radii) != p.arity:
        raise RegistryError(f"{p.name} expects {p.arity} coordinates")
    if any(math.isnan(r) or r < 0 for r in radii):
        raise RegistryError("radius must be a nonnegative number")
    if any(r == INF for r in radii) or any(not math.isfinite(c) for c in centers):
        return INF
    box = [Interval.around(c, r) for c, r in zip(centers, radii)]
    enc = p.enclose(box)
    width = enc.width()
    if p.lipschitz is not None and enc.is_bounded:
        total = 0.0
        for r in radii:
            total = add_up(total, r)
        # the Lipschitz bound holds for exact arithmetic; rounded evaluations
        # can each be off by a couple of ulps of the result
        slack = 4 * math.ulp(enc.mag())
        width = min(width, add_up(mul_up(2.0 * p.lipschitz, total), slack))
    return width


def spot_check(p: PrimSpec, rng: random.Random, trials: int = 200, span: float = 10.0) -> None:
    """Sample boxes and point pairs; raise if the enclosure or Lipschitz claim fails."""
    for _ in range(trials):
        box = []
        for _ in range(p.arity):
            a, b = sorted((rng.uniform(-span, span), rng.uniform(-span, span)))
            box.append(Interval(a, b))
        enc = p.enclose(box)
        pts = [tuple(rng.uniform(iv.lo, iv.hi) for iv in box) for _ in range(4)]
        pts.append(tuple(iv.lo for iv in box))
        pts.append(tuple(iv.hi for iv in box))
        for x in pts:
            y = p.eval(*x)
            if not enc.contains(y):
                raise RegistryError(f"{p.name}: enclosure {enc!r} misses value {y!r} at {x!r}")
        if p.lipschitz is not None:
            x, y = pts[0], pts[1]
            lhs = abs(p.eval(*x) - p.eval(*y))
            rhs = p.lipschitz * sum(abs(a - b) for a, b in zip(x, y))
            # slack covers rounding in the two evaluations
            if lhs > rhs + 4 * math.ulp(max(1.0, abs(p.eval(*x)))):
                raise RegistryError(f"{p.name}: Lipschitz bound fails at {x!r}, {y!r}")
