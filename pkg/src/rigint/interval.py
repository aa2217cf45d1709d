"""Directed-rounded interval arithmetic.

Every operation returns an interval that contains the exact real result set
(outward rounding).  Finite endpoint arithmetic is done in double precision
and then nudged one step toward the appropriate infinity with
``math.nextafter``; since round-to-nearest is off by at most half an ulp,
the nudged endpoints are sound bounds.  Transcendental endpoints (exp, log,
sin, cos, pow) are widened by two ulps to cover libm error; sqrt is
correctly rounded per IEEE 754 and gets one ulp.

Division by an interval containing zero does not produce a two-piece
result; it returns the :data:`INDETERMINATE` sentinel and the caller is
expected to subdivide.  The empty interval is the distinct sentinel
:data:`EMPTY`, never a reversed pair of endpoints.

All values are immutable; everything here is safe for unrestricted
concurrent use.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

_INF = math.inf

__all__ = [
    "Interval",
    "EMPTY",
    "INDETERMINATE",
    "DomainError",
    "add",
    "sub",
    "mul",
    "div",
    "monotone_env",
    "is_indeterminate",
    "sum_down",
    "sum_up",
    "widen_ulps",
]


class DomainError(ValueError):
    """Input lies outside the mathematical domain of an operation."""


class _Indeterminate:
    """Sentinel for division by a zero-containing interval."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INDETERMINATE"


INDETERMINATE = _Indeterminate()


def is_indeterminate(value) -> bool:
    return value is INDETERMINATE


def _down(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


def widen_ulps(x: float, k: int, direction: float) -> float:
    """Step ``x`` by ``k`` representable values toward ``direction``."""
    for _ in range(k):
        x = math.nextafter(x, direction)
    return x


class Interval:
    """Closed interval [lo, hi] with lo <= hi; endpoints may be infinite."""

    __slots__ = ("lo", "hi")

    lo: float
    hi: float

    def __init__(self, lo: float, hi: float):
        if type(lo) is not float:
            lo = float(lo)
        if type(hi) is not float:
            hi = float(hi)
        if not lo <= hi:  # also rejects NaN endpoints
            raise ValueError(f"invalid interval endpoints [{lo}, {hi}]")
        if lo == _INF or hi == -_INF:
            raise ValueError("interval collapsed onto an infinity")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __setattr__(self, name, value):
        raise AttributeError("Interval is immutable")

    # -- constructors -------------------------------------------------

    @staticmethod
    def point(v: float) -> "Interval":
        return Interval(v, v)

    @staticmethod
    def hull(*items: "Interval") -> "Interval":
        members = [iv for iv in items if iv is not EMPTY]
        if not members:
            return EMPTY
        return Interval(min(iv.lo for iv in members), max(iv.hi for iv in members))

    # -- predicates ----------------------------------------------------

    @property
    def is_empty(self) -> bool:
        return self is EMPTY

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def midpoint(self) -> float:
        return self.lo + (self.hi - self.lo) / 2.0

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        if other is EMPTY:
            return True
        return self.lo <= other.lo and other.hi <= self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi

    def __eq__(self, other):
        if not isinstance(other, Interval):
            return NotImplemented
        return self is other or (self.lo == other.lo and self.hi == other.hi
                                 and other is not EMPTY and self is not EMPTY)

    def __hash__(self):
        return hash((self.lo, self.hi, self is EMPTY))

    def __repr__(self):
        if self is EMPTY:
            return "Interval.EMPTY"
        return f"[{self.lo!r}, {self.hi!r}]"

    # -- arithmetic ----------------------------------------------------

    def __neg__(self) -> "Interval":
        if self is EMPTY:
            return EMPTY
        return Interval(-self.hi, -self.lo)

    def __add__(self, other: "Interval") -> "Interval":
        if self is EMPTY or other is EMPTY:
            return EMPTY
        # an IEEE sum that rounds to 0 is exactly 0 (subnormal sums are
        # exact), so zero endpoints need no outward nudge
        lo = self.lo + other.lo
        hi = self.hi + other.hi
        return Interval(lo if lo == 0.0 else _down(lo),
                        hi if hi == 0.0 else _up(hi))

    def __sub__(self, other: "Interval") -> "Interval":
        if self is EMPTY or other is EMPTY:
            return EMPTY
        lo = self.lo - other.hi
        hi = self.hi - other.lo
        return Interval(lo if lo == 0.0 else _down(lo),
                        hi if hi == 0.0 else _up(hi))

    def __mul__(self, other: "Interval") -> "Interval":
        if self is EMPTY or other is EMPTY:
            return EMPTY
        # exact annihilator: {0 * y} = {0} for every real y
        if self.lo == 0.0 == self.hi or other.lo == 0.0 == other.hi:
            return _ZERO
        a, b, c, d = self.lo, self.hi, other.lo, other.hi
        p1 = a * c
        p2 = a * d
        p3 = b * c
        p4 = b * d
        # 0 * inf endpoint products are NaN; the attainable limit there is 0
        if p1 != p1:
            p1 = 0.0
        if p2 != p2:
            p2 = 0.0
        if p3 != p3:
            p3 = 0.0
        if p4 != p4:
            p4 = 0.0
        return Interval(_down(min(p1, p2, p3, p4)), _up(max(p1, p2, p3, p4)))

    def div(self, other: "Interval") -> "Union[Interval, _Indeterminate]":
        """Quotient enclosure, or ``INDETERMINATE`` when 0 is in ``other``."""
        if self is EMPTY or other is EMPTY:
            return EMPTY
        if other.contains_zero():
            return INDETERMINATE
        if self.lo == 0.0 == self.hi:
            return _ZERO
        a, b, c, d = self.lo, self.hi, other.lo, other.hi
        quotients = (a / c, a / d, b / c, b / d)
        cleaned = [0.0 if math.isnan(q) else q for q in quotients]
        return Interval(_down(min(cleaned)), _up(max(cleaned)))

    # -- monotone / piecewise-monotone envelopes ------------------------

    def abs(self) -> "Interval":
        if self is EMPTY:
            return EMPTY
        if self.lo >= 0.0:
            return self
        if self.hi <= 0.0:
            return Interval(-self.hi, -self.lo)
        return Interval(0.0, max(-self.lo, self.hi))

    def sign(self) -> "Interval":
        """Enclosure of sign(x) over the interval (values in {-1, 0, 1})."""
        if self is EMPTY:
            return EMPTY
        if self.lo > 0.0:
            return _ONE
        if self.hi < 0.0:
            return _MINUS_ONE
        return Interval(-1.0 if self.lo < 0.0 else 0.0,
                        1.0 if self.hi > 0.0 else 0.0)

    def pow_int(self, n: int) -> "Union[Interval, _Indeterminate]":
        if self is EMPTY:
            return EMPTY
        if n == 0:
            return _ONE  # x^0 == 1, integer-exponent convention
        if n == 1:
            return self
        if n < 0:
            denom = self.pow_int(-n)
            if denom is INDETERMINATE:
                return INDETERMINATE
            return _ONE.div(denom)
        if self.is_point and math.isfinite(self.lo) and n <= 512:
            return _exact_point_pow(self.lo, n)
        if n % 2 == 1:
            return Interval(_pow_out(self.lo, n, -_INF), _pow_out(self.hi, n, _INF))
        # even power: image is nonnegative
        if self.lo >= 0.0:
            return Interval(max(0.0, _pow_out(self.lo, n, -_INF)),
                            _pow_out(self.hi, n, _INF))
        if self.hi <= 0.0:
            return Interval(max(0.0, _pow_out(self.hi, n, -_INF)),
                            _pow_out(self.lo, n, _INF))
        return Interval(0.0, _pow_out(max(-self.lo, self.hi), n, _INF))

    def sqrt(self) -> "Interval":
        if self is EMPTY:
            return EMPTY
        if self.lo < 0.0:
            raise DomainError(f"sqrt of interval reaching below 0: {self}")
        lo = max(0.0, _down(math.sqrt(self.lo)))
        hi = _up(math.sqrt(self.hi)) if self.hi != _INF else _INF
        return Interval(lo, hi)

    def exp(self) -> "Interval":
        if self is EMPTY:
            return EMPTY
        lo = max(0.0, widen_ulps(_safe_exp(self.lo), 2, -_INF))
        hi = widen_ulps(_safe_exp(self.hi), 2, _INF) if self.hi != _INF else _INF
        return Interval(lo, hi)

    def log(self) -> "Interval":
        if self is EMPTY:
            return EMPTY
        if self.lo <= 0.0:
            raise DomainError(f"log of interval touching values <= 0: {self}")
        lo = widen_ulps(math.log(self.lo), 2, -_INF)
        hi = widen_ulps(math.log(self.hi), 2, _INF) if self.hi != _INF else _INF
        return Interval(lo, hi)

    def sin(self) -> "Interval":
        if self is EMPTY:
            return EMPTY
        return _trig_envelope(self.lo, self.hi, math.sin, _HALF_PI, -_HALF_PI)

    def cos(self) -> "Interval":
        if self is EMPTY:
            return EMPTY
        return _trig_envelope(self.lo, self.hi, math.cos, 0.0, _PI)


EMPTY = object.__new__(Interval)
object.__setattr__(EMPTY, "lo", math.nan)
object.__setattr__(EMPTY, "hi", math.nan)

_ZERO = Interval(0.0, 0.0)
_ONE = Interval(1.0, 1.0)
_MINUS_ONE = Interval(-1.0, -1.0)

_PI = math.pi
_HALF_PI = math.pi / 2.0
_TWO_PI = 2.0 * math.pi


def _safe_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return _INF


def _pow_out(x: float, n: int, direction: float) -> float:
    """x**n widened two ulps toward ``direction`` (libm pow is not exact)."""
    if not math.isfinite(x):
        return x if n % 2 == 1 or x > 0 else _INF
    try:
        v = math.pow(x, n)
    except OverflowError:
        v = _INF if x > 0 or n % 2 == 0 else -_INF
    if math.isinf(v):
        # one step back from the infinity stays a valid one-sided bound
        return v if (v > 0) == (direction > 0) else math.nextafter(v, direction)
    return widen_ulps(v, 2, direction)


def _exact_point_pow(v: float, n: int) -> Interval:
    """Tight enclosure of v**n via exact rational arithmetic (point input)."""
    exact = Fraction(v) ** n
    f = float(exact)
    if math.isinf(f):
        return Interval(math.nextafter(f, 0.0), f) if f > 0 else Interval(f, math.nextafter(f, 0.0))
    back = Fraction(f)
    if back == exact:
        return Interval(f, f)
    if back > exact:
        return Interval(_down(f), f)
    return Interval(f, _up(f))


def _trig_envelope(lo: float, hi: float, fn, max_phase: float, min_phase: float) -> Interval:
    """Shared sin/cos range bounding.

    ``max_phase``/``min_phase`` are the offsets of the maxima/minima from
    multiples of 2*pi.  Critical-point membership tests are widened by a
    generous slack so rounding in the phase arithmetic can only make the
    result wider, never tighter.
    """
    if not (math.isfinite(lo) and math.isfinite(hi)):
        return Interval(-1.0, 1.0)
    if hi - lo >= _TWO_PI or max(abs(lo), abs(hi)) > 2.0 ** 50:
        return Interval(-1.0, 1.0)
    f_lo = widen_ulps(fn(lo), 2, -_INF)
    f_hi = widen_ulps(fn(hi), 2, -_INF)
    out_lo = min(f_lo, f_hi)
    out_hi = max(widen_ulps(fn(lo), 2, _INF), widen_ulps(fn(hi), 2, _INF))
    if _contains_phase_point(lo, hi, max_phase):
        out_hi = 1.0
    if _contains_phase_point(lo, hi, min_phase):
        out_lo = -1.0
    return Interval(max(out_lo, -1.0), min(out_hi, 1.0))


def _contains_phase_point(lo: float, hi: float, phase: float) -> bool:
    """Could phase + 2*k*pi lie in [lo, hi] for an integer k? (conservative)"""
    k_lo = math.floor((lo - phase) / _TWO_PI) - 1
    k_hi = math.ceil((hi - phase) / _TWO_PI) + 1
    for k in range(k_lo, k_hi + 1):
        crit = phase + _TWO_PI * k
        slack = 1e-12 * max(1.0, abs(crit))
        if lo - slack <= crit <= hi + slack:
            return True
    return False


# -- spec-level operation names -----------------------------------------


def add(lhs: Interval, rhs: Interval) -> Interval:
    return lhs + rhs


def sub(lhs: Interval, rhs: Interval) -> Interval:
    return lhs - rhs


def mul(lhs: Interval, rhs: Interval) -> Interval:
    return lhs * rhs


def div(lhs: Interval, rhs: Interval):
    return lhs.div(rhs)


_ENVELOPES = {
    "exp": lambda x, n: x.exp(),
    "log": lambda x, n: x.log(),
    "sqrt": lambda x, n: x.sqrt(),
    "abs": lambda x, n: x.abs(),
    "pow-n": lambda x, n: x.pow_int(n),
    "sin": lambda x, n: x.sin(),
    "cos": lambda x, n: x.cos(),
}


def monotone_env(fn_tag: str, x: Interval, n: int | None = None):
    """Sound image enclosure for the named elementary function."""
    try:
        env = _ENVELOPES[fn_tag]
    except KeyError:
        raise ValueError(f"unknown function tag {fn_tag!r}") from None
    if fn_tag == "pow-n" and n is None:
        raise ValueError("pow-n requires an integer exponent")
    return env(x, n)


# -- directed accumulation ----------------------------------------------


def _exact_fsum_residual(terms, total: float) -> float:
    return math.fsum([*terms, -total])


def sum_down(terms) -> float:
    """Lower bound of the exact sum of ``terms`` (each already a lower bound)."""
    terms = list(terms)
    if any(t == -_INF for t in terms):
        return -_INF
    s = math.fsum(terms)
    if not math.isfinite(s):
        return math.nextafter(s, -_INF) if s == _INF else s
    # fsum is correctly rounded, so the true sum is within half an ulp;
    # a nonzero residual is representable and reveals the rounding side.
    return s if _exact_fsum_residual(terms, s) >= 0.0 else _down(s)


def sum_up(terms) -> float:
    """Upper bound of the exact sum of ``terms`` (each already an upper bound)."""
    terms = list(terms)
    if any(t == _INF for t in terms):
        return _INF
    s = math.fsum(terms)
    if not math.isfinite(s):
        return math.nextafter(s, _INF) if s == -_INF else s
    return s if _exact_fsum_residual(terms, s) <= 0.0 else _up(s)
