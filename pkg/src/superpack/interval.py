"""Outward-rounded interval arithmetic in double precision.

Rounding strategy: IEEE-754 ``+ - * /`` are correctly rounded, so the exact
result lies within one ulp of the computed one.  Error-free transformations
(Knuth's two-sum, Dekker's two-product, the exact division remainder) give
the sign of the rounding error, and only the endpoint on the wrong side is
moved one ulp with ``math.nextafter``; exact results are not widened.  Near
underflow or overflow both sides are widened instead.

``pow`` evaluates ``math.pow`` at the box corners and widens each corner by a
relative slack of 2**-50 (four ulp; glibc ``pow`` is documented to within
one ulp) followed by one ``nextafter`` step.

No rounding-mode switches are used, so values are safe to share between
threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

_INF = math.inf
POW_SLACK = 2.0**-50


def _down(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


def _two_sum(a: float, b: float) -> tuple[float, float]:
    """s = fl(a + b) and the exact error a + b - s (Knuth)."""
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def _add_down(a: float, b: float) -> float:
    s, err = _two_sum(a, b)
    if not math.isfinite(err):
        return _down(s)
    return _down(s) if err < 0.0 else s


def _add_up(a: float, b: float) -> float:
    s, err = _two_sum(a, b)
    if not math.isfinite(err):
        return _up(s)
    return _up(s) if err > 0.0 else s


_SPLIT = 134217729.0  # 2**27 + 1
# below this magnitude the error terms may be inexact (subnormal range)
_TINY = 2.0**-960
_HUGE = 2.0**996


def _split(a: float) -> tuple[float, float]:
    c = _SPLIT * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a: float, b: float) -> tuple[float, float]:
    """p = fl(a * b) and the exact error a * b - p (Dekker)."""
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def _safe(x: float) -> bool:
    return _TINY < abs(x) < _HUGE


def _directed(r: float, err: float) -> tuple[float, float]:
    if err == 0.0:
        return r, r
    return (_down(r), r) if err < 0.0 else (r, _up(r))


def _mul_bounds(a: float, b: float) -> tuple[float, float]:
    if a == 0.0 or b == 0.0:
        return 0.0, 0.0
    r = a * b
    if _safe(a) and _safe(b) and _safe(r):
        return _directed(r, _two_prod(a, b)[1])
    return _down(r), _up(r)


def _div_bounds(a: float, b: float) -> tuple[float, float]:
    if a == 0.0:
        return 0.0, 0.0
    r = a / b
    if _safe(a) and _safe(b) and _safe(r):
        # a - r b is exact in floating point; its sign is that of a/b - r
        p, e = _two_prod(r, b)
        rem = (a - p) - e
        if b < 0.0:
            rem = -rem
        return _directed(r, rem)
    return _down(r), _up(r)


@dataclass(frozen=True, slots=True)
class Interval:
    """Closed interval [lo, hi] of reals with finite endpoints."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise OverflowError(f"non-finite interval endpoint: [{lo}, {hi}]")
        if lo > hi:
            raise ValueError(f"empty interval: lo={lo} > hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x: float) -> "Interval":
        return cls(x, x)

    @classmethod
    def around(cls, center: float, radius: float) -> "Interval":
        """Enclosure of [center - radius, center + radius]."""
        return cls(_add_down(center, -radius), _add_up(center, radius))

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def subset_of(self, other: "Interval") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def __str__(self) -> str:
        return f"[{self.lo:.17g},{self.hi:.17g}]"

    # arithmetic -------------------------------------------------------

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __pos__(self) -> "Interval":
        return self

    def __abs__(self) -> "Interval":
        return abs_val(self)

    def __add__(self, other) -> "Interval":
        return add(self, other)

    def __radd__(self, other) -> "Interval":
        return add(other, self)

    def __sub__(self, other) -> "Interval":
        return sub(self, other)

    def __rsub__(self, other) -> "Interval":
        return sub(other, self)

    def __mul__(self, other) -> "Interval":
        return mul(self, other)

    def __rmul__(self, other) -> "Interval":
        return mul(other, self)

    def __truediv__(self, other) -> "Interval":
        return div(self, other)

    def __rtruediv__(self, other) -> "Interval":
        return div(other, self)

    def __pow__(self, other) -> "Interval":
        return ipow(self, other)


def as_interval(x) -> Interval:
    if isinstance(x, Interval):
        return x
    return Interval.point(float(x))


def add(a, b) -> Interval:
    a, b = as_interval(a), as_interval(b)
    return Interval(_add_down(a.lo, b.lo), _add_up(a.hi, b.hi))


def sub(a, b) -> Interval:
    a, b = as_interval(a), as_interval(b)
    return Interval(_add_down(a.lo, -b.hi), _add_up(a.hi, -b.lo))


def neg(a) -> Interval:
    return -as_interval(a)


def mul(a, b) -> Interval:
    a, b = as_interval(a), as_interval(b)
    los, his = zip(
        *(_mul_bounds(s, t) for s in (a.lo, a.hi) for t in (b.lo, b.hi))
    )
    return Interval(min(los), max(his))


def div(a, b) -> Interval:
    a, b = as_interval(a), as_interval(b)
    if b.lo <= 0.0 <= b.hi:
        raise ZeroDivisionError(f"division by interval containing zero: {b}")
    los, his = zip(
        *(_div_bounds(s, t) for s in (a.lo, a.hi) for t in (b.lo, b.hi))
    )
    return Interval(min(los), max(his))


def abs_val(a) -> Interval:
    a = as_interval(a)
    if a.lo >= 0.0:
        return a
    if a.hi <= 0.0:
        return Interval(-a.hi, -a.lo)
    return Interval(0.0, max(-a.lo, a.hi))


def imax(*items) -> Interval:
    """Enclosure of max over the given intervals."""
    ivs = [as_interval(x) for x in items]
    return Interval(max(i.lo for i in ivs), max(i.hi for i in ivs))


def _pow_bounds(b: float, e: float) -> tuple[float, float]:
    """Rigorous lower/upper bounds of b**e for b >= 0, e >= 0 (0**0 = 1)."""
    if e == 0.0 or b == 1.0:
        return 1.0, 1.0
    if b == 0.0:
        return 0.0, 0.0
    v = math.pow(b, e)
    lo = max(0.0, _down(v - v * POW_SLACK))
    hi = _up(v + v * POW_SLACK)
    if hi == 0.0:
        hi = _up(0.0)
    return lo, hi


def ipow(base, exponent) -> Interval:
    """Enclosure of {b**e : b in base, e in exponent}.

    Requires ``base`` within [0, inf) and ``exponent`` within [0, inf).
    For fixed e >= 0, b**e is nondecreasing in b, and for fixed b it is
    monotone in e, so the minimum sits at b = base.lo and the maximum at
    b = base.hi, each at one of the two exponent endpoints.
    """
    base, exponent = as_interval(base), as_interval(exponent)
    if base.lo < 0.0:
        raise ValueError(f"pow requires a nonnegative base, got {base}")
    if exponent.lo < 0.0:
        raise ValueError(f"pow requires a nonnegative exponent, got {exponent}")
    lo = min(_pow_bounds(base.lo, exponent.lo)[0], _pow_bounds(base.lo, exponent.hi)[0])
    hi = max(_pow_bounds(base.hi, exponent.lo)[1], _pow_bounds(base.hi, exponent.hi)[1])
    return Interval(lo, hi)


def vec_linf(v: Iterable) -> Interval:
    """Enclosure of the max-abs norm of a vector of intervals."""
    return imax(*(abs_val(x) for x in v))


class IntervalMatrix3:
    """3x3 matrix of intervals (row-major)."""

    __slots__ = ("entries",)

    def __init__(self, entries: Sequence[Sequence]):
        rows = tuple(tuple(as_interval(x) for x in row) for row in entries)
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise ValueError("IntervalMatrix3 needs exactly 3x3 entries")
        self.entries = rows

    @classmethod
    def from_points(cls, M) -> "IntervalMatrix3":
        return cls([[float(M[i][j]) for j in range(3)] for i in range(3)])

    @classmethod
    def identity(cls) -> "IntervalMatrix3":
        return cls([[1.0 if i == j else 0.0 for j in range(3)] for i in range(3)])

    def __getitem__(self, idx):
        i, j = idx
        return self.entries[i][j]

    def rows(self):
        return self.entries

    def __matmul__(self, other: "IntervalMatrix3") -> "IntervalMatrix3":
        return mat_mul(self, other)

    def __sub__(self, other: "IntervalMatrix3") -> "IntervalMatrix3":
        return IntervalMatrix3(
            [[self[i, j] - other[i, j] for j in range(3)] for i in range(3)]
        )

    def __mul__(self, scalar) -> "IntervalMatrix3":
        return IntervalMatrix3([[x * scalar for x in row] for row in self.entries])

    __rmul__ = __mul__

    def contains(self, M) -> bool:
        return all(self[i, j].contains(M[i][j]) for i in range(3) for j in range(3))

    def __repr__(self) -> str:
        body = "; ".join(", ".join(str(x) for x in row) for row in self.entries)
        return f"IntervalMatrix3({body})"


def mat_mul(A: IntervalMatrix3, B: IntervalMatrix3) -> IntervalMatrix3:
    out = []
    for i in range(3):
        row = []
        for j in range(3):
            acc = A[i, 0] * B[0, j]
            acc = acc + A[i, 1] * B[1, j]
            acc = acc + A[i, 2] * B[2, j]
            row.append(acc)
        out.append(row)
    return IntervalMatrix3(out)


def linf_op_norm(M: IntervalMatrix3) -> Interval:
    """Enclosure of the l-infinity operator norm: max row sum of |entries|."""
    sums = []
    for row in M.rows():
        s = abs_val(row[0])
        s = s + abs_val(row[1])
        s = s + abs_val(row[2])
        sums.append(s)
    return imax(*sums)
