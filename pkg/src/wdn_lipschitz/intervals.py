"""Closed real intervals with outward-rounded arithmetic.

Every operation returns an interval that contains the exact real result for
all points of the inputs (inclusion isotonicity).  Directed rounding is done
with ulp nudges via math.nextafter:

* add/sub recover the exact rounding error with TwoSum, so results that are
  exactly representable stay tight;
* mul compares against the exact rational product, again staying tight on
  exact cases;
* abs_pow is exact for small integer exponents (rational comparison) and
  otherwise widens the libm result by 4 ulps each way, which dominates the
  library's worst-case pow error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

_INF = math.inf
_POW_EXACT_MAX_EXP = 64


def ulp_up(x: float, steps: int = 1) -> float:
    for _ in range(steps):
        x = math.nextafter(x, _INF)
    return x


def ulp_down(x: float, steps: int = 1) -> float:
    for _ in range(steps):
        x = math.nextafter(x, -_INF)
    return x


def _two_sum(a: float, b: float) -> tuple[float, float]:
    s = a + b
    a_part = s - b
    b_part = s - a_part
    err = (a - a_part) + (b - b_part)
    return s, err


def add_down(a: float, b: float) -> float:
    s, err = _two_sum(a, b)
    return ulp_down(s) if err < 0.0 else s


def add_up(a: float, b: float) -> float:
    s, err = _two_sum(a, b)
    return ulp_up(s) if err > 0.0 else s


def mul_down(a: float, b: float) -> float:
    p = a * b
    exact = Fraction(a) * Fraction(b)
    while Fraction(p) > exact:
        p = ulp_down(p)
    return p


def mul_up(a: float, b: float) -> float:
    p = a * b
    exact = Fraction(a) * Fraction(b)
    while Fraction(p) < exact:
        p = ulp_up(p)
    return p


def pow_abs_down(base: float, p: float) -> float:
    """Largest float <= base**p for base >= 0 (exact for small integer p)."""
    if base < 0:
        raise ValueError("base must be >= 0")
    if p == 0.0 or base == 1.0:
        return 1.0
    if base == 0.0:
        return 0.0
    r = math.pow(base, p)
    if p == int(p) and abs(p) <= _POW_EXACT_MAX_EXP:
        exact = Fraction(base) ** int(p)
        while Fraction(r) > exact:
            r = ulp_down(r)
        return r
    return max(0.0, ulp_down(r, 4))


def pow_abs_up(base: float, p: float) -> float:
    """Smallest float >= base**p for base >= 0 (exact for small integer p)."""
    if base < 0:
        raise ValueError("base must be >= 0")
    if p == 0.0 or base == 1.0:
        return 1.0
    if base == 0.0:
        return 0.0
    r = math.pow(base, p)
    if p == int(p) and abs(p) <= _POW_EXACT_MAX_EXP:
        exact = Fraction(base) ** int(p)
        while Fraction(r) < exact:
            r = ulp_up(r)
        return r
    return ulp_up(r, 4)


def sqrt_down(x: float) -> float:
    # r <= sqrt(x) iff r*r <= x, checked exactly in rationals
    r = math.sqrt(x)
    if Fraction(r) * Fraction(r) > Fraction(x):
        return max(0.0, ulp_down(r))
    return r


def sqrt_up(x: float) -> float:
    r = math.sqrt(x)
    if Fraction(r) * Fraction(r) < Fraction(x):
        return ulp_up(r)
    return r


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("interval endpoints must be finite")
        if self.lo > self.hi:
            raise ValueError(f"inverted interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x: float) -> "Interval":
        return cls(x, x)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def midpoint(self) -> float:
        mid = 0.5 * (self.lo + self.hi)
        return min(max(mid, self.lo), self.hi)

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(add_down(self.lo, other.lo), add_up(self.hi, other.hi))

    def __sub__(self, other: "Interval") -> "Interval":
        return Interval(add_down(self.lo, -other.hi), add_up(self.hi, -other.lo))

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __mul__(self, other: "Interval") -> "Interval":
        pairs = ((self.lo, other.lo), (self.lo, other.hi),
                 (self.hi, other.lo), (self.hi, other.hi))
        return Interval(min(mul_down(a, b) for a, b in pairs),
                        max(mul_up(a, b) for a, b in pairs))

    def scale(self, factor: float) -> "Interval":
        return self * Interval.point(factor)

    def abs_pow(self, p: float) -> "Interval":
        """Range of |x|**p over the interval; requires p >= 0.

        |x|**p is monotone in |x|, so the range comes from the endpoint
        magnitudes, with minimum 0 when the interval crosses zero.
        """
        if p < 0:
            raise ValueError("abs_pow exponent must be >= 0")
        m_hi = max(abs(self.lo), abs(self.hi))
        m_lo = 0.0 if self.lo <= 0.0 <= self.hi else min(abs(self.lo), abs(self.hi))
        return Interval(pow_abs_down(m_lo, p), pow_abs_up(m_hi, p))


def interval_max(items: list[Interval]) -> Interval:
    """Range of max_i x_i with x_i drawn independently from the items."""
    if not items:
        raise ValueError("empty interval list")
    return Interval(max(iv.lo for iv in items), max(iv.hi for iv in items))


def interval_sum(items: list[Interval]) -> Interval:
    """Range of sum_i x_i; fsum is correctly rounded so one nudge certifies."""
    if not items:
        raise ValueError("empty interval list")
    lo = math.fsum(iv.lo for iv in items)
    hi = math.fsum(iv.hi for iv in items)
    return Interval(ulp_down(lo), ulp_up(hi))


def interval_sqrt(iv: Interval) -> Interval:
    if iv.lo < 0:
        raise ValueError("sqrt of an interval with negative points")
    return Interval(sqrt_down(iv.lo), sqrt_up(iv.hi))
