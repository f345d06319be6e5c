"""Outward-rounded interval arithmetic on binary64.

Sums and products are rounded in the safe direction only when the float result
is inexact, so degenerate intervals stay degenerate under exact operations.
Elementary functions widen the libm result by two ulps, which covers both the
true value and libm's own answer at nearby points.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from fractions import Fraction

INF = math.inf
MAX = sys.float_info.max
TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi


def _up(x: float) -> float:
    return math.nextafter(x, INF)


def _down(x: float) -> float:
    return math.nextafter(x, -INF)


def _sum_error(a: float, b: float, s: float) -> float:
    # Knuth TwoSum: exact a + b - s for finite inputs
    bb = s - a
    return (a - (s - bb)) + (b - bb)


def _overflow(r: float, a: float, b: float, upward: bool) -> float | None:
    """The directed result when finite arguments overflow, or None when they do not."""
    if math.isfinite(r) or not (math.isfinite(a) and math.isfinite(b)):
        return None
    # the true value is finite, so rounding toward zero stops at the largest double
    if math.isnan(r):
        return r
    if upward and r < 0:
        return -MAX
    if not upward and r > 0:
        return MAX
    return r


def add_up(a: float, b: float) -> float:
    s = a + b
    o = _overflow(s, a, b, True)
    if o is not None or not math.isfinite(s):
        return s if o is None else o
    return _up(s) if _sum_error(a, b, s) > 0 else s


def add_down(a: float, b: float) -> float:
    s = a + b
    o = _overflow(s, a, b, False)
    if o is not None or not math.isfinite(s):
        return s if o is None else o
    return _down(s) if _sum_error(a, b, s) < 0 else s


def sub_up(a: float, b: float) -> float:
    return add_up(a, -b)


def sub_down(a: float, b: float) -> float:
    return add_down(a, -b)


def _exact_cmp(a: float, b: float, p: float, op) -> int:
    """Sign of (true a op b) - p, for finite arguments."""
    true = op(Fraction(a), Fraction(b))
    fp = Fraction(p)
    return (true > fp) - (true < fp)


def mul_up(a: float, b: float) -> float:
    p = a * b
    o = _overflow(p, a, b, True)
    if o is not None or not math.isfinite(p):
        return p if o is None else o
    return _up(p) if _exact_cmp(a, b, p, lambda x, y: x * y) > 0 else p


def mul_down(a: float, b: float) -> float:
    p = a * b
    o = _overflow(p, a, b, False)
    if o is not None or not math.isfinite(p):
        return p if o is None else o
    return _down(p) if _exact_cmp(a, b, p, lambda x, y: x * y) < 0 else p


def div_up(a: float, b: float) -> float:
    q = a / b
    o = _overflow(q, a, b, True)
    if o is not None or not math.isfinite(q):
        return q if o is None else o
    return _up(q) if _exact_cmp(a, b, q, lambda x, y: x / y) > 0 else q


def div_down(a: float, b: float) -> float:
    q = a / b
    o = _overflow(q, a, b, False)
    if o is not None or not math.isfinite(q):
        return q if o is None else o
    return _down(q) if _exact_cmp(a, b, q, lambda x, y: x / y) < 0 else q


def _widen(x: float, ulps: int = 2) -> tuple[float, float]:
    lo = hi = x
    for _ in range(ulps):
        lo, hi = _down(lo), _up(hi)
    return lo, hi


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi):
            raise ValueError("interval bound is nan")
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x: float) -> "Interval":
        return cls(x, x)

    @classmethod
    def around(cls, center: float, radius: float) -> "Interval":
        """``[center - radius, center + radius]`` rounded outward."""
        if radius == INF:
            return ENTIRE
        return cls(sub_down(center, radius), add_up(center, radius))

    def __repr__(self):
        return f"[{self.lo!r}, {self.hi!r}]"

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    @property
    def is_bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    def width(self) -> float:
        """Upper bound on ``hi - lo``."""
        if not self.is_bounded:
            return INF
        return sub_up(self.hi, self.lo)

    def mag(self) -> float:
        return max(abs(self.lo), abs(self.hi))

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(add_down(self.lo, other.lo), add_up(self.hi, other.hi))

    def __sub__(self, other: "Interval") -> "Interval":
        return Interval(sub_down(self.lo, other.hi), sub_up(self.hi, other.lo))

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __mul__(self, other: "Interval") -> "Interval":
        pairs = [(a, b) for a in (self.lo, self.hi) for b in (other.lo, other.hi)]
        los, his = [], []
        for a, b in pairs:
            if (a == 0 and math.isinf(b)) or (b == 0 and math.isinf(a)):
                # 0 * inf arises only as a limit; the finite products dominate
                los.append(0.0)
                his.append(0.0)
                continue
            los.append(mul_down(a, b))
            his.append(mul_up(a, b))
        return Interval(min(los), max(his))

    def recip(self) -> "Interval":
        if self.lo <= 0.0 <= self.hi:
            return ENTIRE
        return Interval(div_down(1.0, self.hi), div_up(1.0, self.lo))

    def __truediv__(self, other: "Interval") -> "Interval":
        if other.lo <= 0.0 <= other.hi:
            return ENTIRE
        return self * other.recip()

    def __abs__(self) -> "Interval":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Interval(0.0, max(-self.lo, self.hi))


ENTIRE = Interval(-INF, INF)


def _sin_point(x: float) -> tuple[float, float]:
    if x == 0.0:
        return x, x
    lo, hi = _widen(math.sin(x))
    return max(lo, -1.0), min(hi, 1.0)


def _cos_point(x: float) -> tuple[float, float]:
    if x == 0.0:
        return 1.0, 1.0
    lo, hi = _widen(math.cos(x))
    return max(lo, -1.0), min(hi, 1.0)


def _hits(lo: float, hi: float, offset: float) -> bool:
    """Could ``offset + 2 k pi`` lie in ``[lo, hi]`` for some integer k?

    Errs on the side of answering yes.
    """
    slack = 1e-12 * max(1.0, abs(lo), abs(hi))
    k_lo = math.ceil((lo - offset) / TWO_PI - slack)
    k_hi = math.floor((hi - offset) / TWO_PI + slack)
    return k_lo <= k_hi


def _periodic(x: Interval, point_fn, max_at: float, min_at: float) -> Interval:
    if not x.is_bounded or x.hi - x.lo >= TWO_PI:
        return Interval(-1.0, 1.0)
    if x.lo == x.hi:
        return Interval(*point_fn(x.lo))
    a_lo, a_hi = point_fn(x.lo)
    b_lo, b_hi = point_fn(x.hi)
    lo, hi = min(a_lo, b_lo), max(a_hi, b_hi)
    if _hits(x.lo, x.hi, max_at):
        hi = 1.0
    if _hits(x.lo, x.hi, min_at):
        lo = -1.0
    return Interval(lo, hi)


def isin(x: Interval) -> Interval:
    return _periodic(x, _sin_point, HALF_PI, -HALF_PI)


def icos(x: Interval) -> Interval:
    return _periodic(x, _cos_point, 0.0, math.pi)


def iexp(x: Interval) -> Interval:
    def bound(v: float, lower: bool) -> float:
        if v == -INF:
            return 0.0
        if v == INF:
            return INF
        if v == 0.0:
            return 1.0
        try:
            r = math.exp(v)
        except OverflowError:
            return INF if not lower else 1.7976931348623157e308
        lo, hi = _widen(r)
        return max(lo, 0.0) if lower else hi

    return Interval(bound(x.lo, True), bound(x.hi, False))
