"""Rigidity checks for functions flat at the origin.

A :class:`FlatCandidate` is a function f on [0, 1] (zero-extended formulas
allowed) together with a constant C > 0.  Three conditions are checked:

* ``zero``         f(0) = 0
* ``power-bound``  for a given n > 1 there is delta > 0 with
                   |f(x)| < x^n on (0, delta]     (strict)
* ``ratio-bound``  |x * f'(x)| <= C * |f(x)| on [0, 1]   (non-strict)

The strict/non-strict asymmetry is deliberate and preserved exactly.

Certification near x = 0 is a 0/0 frontier that plain interval arithmetic
cannot decide (both sides of each inequality vanish), so every certificate
is split into a blockwise interval proof away from 0 plus a structural
"tail certificate" for the remaining (0, tau] piece.  Tail certificates
exist for the built-in families (the zero function, scaled monomials,
scaled exp(c/x) with c < 0); anything else is reported inconclusive
rather than overclaimed.

:func:`locate_min_crossing` brackets the smallest point where |f| meets
x^n.  A tangency approached from the certified-below side (|f| < x^n on
the left, touching at the point) is not reported as a crossing; the
locator tracks where the power bound definitively fails, which is what
the downstream inequality chain consumes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

from .darboux import enclose
from .expr import (
    Abs,
    Const,
    Div,
    ExtendedExpr,
    Expr,
    Mul,
    PowInt,
    Sign,
    Sub,
    Var,
    eval_interval,
    eval_point,
)
from .interval import DomainError, Interval, is_indeterminate
from .darboux import ExpressionOracle

__all__ = [
    "FlatCandidate",
    "ConditionStatus",
    "ConditionReport",
    "ChainStep",
    "ChainTrace",
    "InconclusiveError",
    "check_zero",
    "check_power_bound",
    "check_ratio_bound",
    "locate_min_crossing",
    "evaluate_chain",
    "derivative_sup_bound",
    "REVERIFY_ULPS",
]

DOMAIN = Interval(0.0, 1.0)

# Witnesses must violate their inequality by more than this many ulps of the
# compared values, so directed rounding can never manufacture a refutation.
REVERIFY_ULPS = 8

# Grid of candidate deltas for the power bound, largest first.
_DELTA_GRID = [2.0 ** -k for k in range(1, 41)]
_DELTA_FLOOR = _DELTA_GRID[-1]

# Relative width of the structurally-handled tail in blockwise proofs.
_TAIL_FACTOR = 2.0 ** -20

# Blockwise interval-proof budgets (number of blocks examined).
_CERT_BUDGET = 4096
_RATIO_EPSILON = 2.0 ** -20

_BRACKET_WIDTH = 2.0 ** -30


class InconclusiveError(RuntimeError):
    """A certification budget ran out before a verdict was reached."""


class ConditionStatus(Enum):
    CERTIFIED = "certified"
    FALSIFIED = "falsified"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True, slots=True)
class FlatCandidate:
    """Function under test plus the ratio-bound constant C > 0."""

    f: ExtendedExpr
    C: float

    def __post_init__(self):
        if not (self.C > 0.0):
            raise ValueError("C must be positive")
        if not isinstance(self.f, ExtendedExpr):
            object.__setattr__(self, "f", ExtendedExpr(self.f, False))


@dataclass(frozen=True, slots=True)
class ConditionReport:
    condition: str  # "zero" | "power-bound" | "ratio-bound"
    status: ConditionStatus
    n: Optional[int] = None
    witness: Optional[float] = None
    delta: Optional[float] = None
    detail: str = ""

    @property
    def certified(self) -> bool:
        return self.status is ConditionStatus.CERTIFIED


# -- shared witness arithmetic -------------------------------------------


def _beyond_rounding(lhs: float, rhs: float, ulps: int = REVERIFY_ULPS) -> bool:
    """|lhs - rhs| exceeds ``ulps`` ulps of the larger magnitude."""
    scale = max(abs(lhs), abs(rhs), 5e-324)
    return abs(lhs - rhs) > ulps * math.ulp(scale)


def _abs_tree(e: Expr) -> Expr:
    return Abs(e)


def _power_gap_tree(f: ExtendedExpr, n: int) -> ExtendedExpr:
    """Tree for |f(x)| - x^n (negative exactly where the power bound holds)."""
    return ExtendedExpr(Sub(Abs(f.base), PowInt(Var(), n)), False)


def _ratio_gap_tree(cand: FlatCandidate) -> ExtendedExpr:
    """Tree for C*|f(x)| - |x*f'(x)| (non-negative where the ratio bound holds)."""
    f_prime = cand.f.base.deriv()
    return ExtendedExpr(
        Sub(
            Mul(Const(cand.C), Abs(cand.f.base)),
            Abs(Mul(Var(), f_prime)),
        ),
        False,
    )


def _point_sign(tree: ExtendedExpr, x: float) -> Optional[str]:
    """Certified sign of tree(x): '+', '-', '0', or None when undecided."""
    enc = eval_interval(tree, Interval.point(x))
    if is_indeterminate(enc):
        return None
    if enc.lo > 0.0:
        return "+"
    if enc.hi < 0.0:
        return "-"
    if enc.lo == 0.0 == enc.hi:
        return "0"
    return None


def _certify_sign_on(
    tree: ExtendedExpr,
    lo: float,
    hi: float,
    want: str,
    budget: int = _CERT_BUDGET,
) -> bool:
    """Blockwise proof that tree is strictly positive ('+') or strictly
    negative ('-') everywhere on [lo, hi].  False when the budget runs out
    or a block becomes unsplittable without a verdict."""
    if lo > hi:
        return True
    worklist = [(lo, hi)]
    used = 0
    while worklist:
        u, v = worklist.pop()
        used += 1
        if used > budget:
            return False
        enc = eval_interval(tree, Interval(u, v))
        if not is_indeterminate(enc):
            if want == "+" and enc.lo > 0.0:
                continue
            if want == "-" and enc.hi < 0.0:
                continue
        mid = u + (v - u) / 2.0
        if not (u < mid < v):
            return False
        worklist.append((u, mid))
        worklist.append((mid, v))
    return True


# -- structural family analysis -------------------------------------------


@dataclass(frozen=True, slots=True)
class _Family:
    kind: str  # "zero" | "monomial" | "exp-inv"
    scale: float = 1.0
    degree: int = 0  # monomial exponent k
    rate: float = 0.0  # a in exp(-a/x)


def _peel(e: Expr) -> tuple[float, Expr]:
    """Strip absolute values, negations, and constant factors."""
    scale = 1.0
    changed = True
    while changed:
        changed = False
        if isinstance(e, Abs):
            scale = abs(scale)
            e = e.arg
            changed = True
        elif isinstance(e, Sub) and isinstance(e.lhs, Const) and e.lhs.value == 0.0:
            scale = -scale
            e = e.rhs
            changed = True
        elif isinstance(e, Mul) and isinstance(e.lhs, Const):
            scale *= e.lhs.value
            e = e.rhs
            changed = True
        elif isinstance(e, Mul) and isinstance(e.rhs, Const):
            scale *= e.rhs.value
            e = e.lhs
            changed = True
    return scale, e


def _family_of(e: Expr) -> Optional[_Family]:
    scale, core = _peel(e)
    if isinstance(core, Const):
        if scale * core.value == 0.0:
            return _Family("zero")
        return None
    if scale == 0.0:
        return _Family("zero")
    if isinstance(core, Var):
        return _Family("monomial", scale=scale, degree=1)
    if isinstance(core, PowInt) and isinstance(core.base, Var) and core.exponent >= 1:
        return _Family("monomial", scale=scale, degree=core.exponent)
    if (
        type(core).__name__ == "Exp"
        and isinstance(core.arg, Div)
        and isinstance(core.arg.lhs, Const)
        and isinstance(core.arg.rhs, Var)
        and core.arg.lhs.value < 0.0
    ):
        return _Family("exp-inv", scale=scale, rate=-core.arg.lhs.value)
    return None


def _tail_compare(f: ExtendedExpr, n: int, tau: float) -> Optional[str]:
    """Side of |f(x)| vs x^n on the whole tail (0, tau], decided
    structurally for the built-in families.

    Returns "<" when |f| < x^n throughout, ">" when |f| > x^n throughout,
    None when the tail cannot be decided.
    """
    fam = _family_of(f.base)
    if fam is None:
        return None
    if fam.kind == "zero":
        return "<"
    s = abs(fam.scale)
    t = Interval.point(tau)
    if fam.kind == "monomial":
        k = fam.degree
        if k > n:
            # s * x^(k-n) is increasing; strict at tau decides the tail
            bound = (Interval.point(s) * t.pow_int(k - n)).hi
            return "<" if bound < 1.0 else None
        if k < n:
            bound = t.pow_int(n - k).hi
            return ">" if bound < s else None
        return "<" if s < 1.0 else (">" if s > 1.0 else None)
    # exp-inv: s*exp(-a/x) < x^n iff a/x + n*log(x) - log(s) > 0; that
    # expression decreases on (0, a/n), so a single check at tau covers
    # the whole tail once tau <= a/n.
    a = fam.rate
    if (t * Interval.point(float(n))).hi > a:
        return None
    psi = Interval.point(a).div(t)
    log_term = t.log() * Interval.point(float(n))
    psi = psi + log_term
    if s != 1.0:
        psi = psi - Interval.point(s).log()
    if is_indeterminate(psi):
        return None
    return "<" if psi.lo > 0.0 else None


# -- condition (zero) ------------------------------------------------------


def check_zero(cand: FlatCandidate) -> ConditionReport:
    """f(0) = 0; structurally true for zero-extended candidates."""
    if cand.f.zero_extended:
        return ConditionReport("zero", ConditionStatus.CERTIFIED,
                               detail="by zero-extension")
    try:
        value = eval_point(cand.f, 0.0)
    except DomainError:
        return ConditionReport("zero", ConditionStatus.FALSIFIED, witness=0.0,
                               detail="undefined at 0")
    if value == 0.0:
        return ConditionReport("zero", ConditionStatus.CERTIFIED,
                               detail="f(0) evaluates to exactly 0")
    if _beyond_rounding(value, 0.0):
        return ConditionReport("zero", ConditionStatus.FALSIFIED, witness=0.0,
                               detail=f"f(0) = {value!r}")
    return ConditionReport("zero", ConditionStatus.INCONCLUSIVE, witness=0.0,
                           detail=f"f(0) = {value!r} within rounding of 0")


# -- condition (power bound) ----------------------------------------------


def _power_samples(delta: float):
    """Deterministic probe points in (0, delta]."""
    for j in range(1, 17):
        yield delta * j / 16.0
    scale = delta
    for _ in range(24):
        scale *= 0.5
        yield scale


def _sample_refutes_power(f: ExtendedExpr, n: int, delta: float) -> bool:
    for x in _power_samples(delta):
        if x <= 0.0:
            continue
        try:
            if abs(eval_point(f, x)) >= x ** n:
                return True
        except (DomainError, OverflowError):
            return True
    return False


def _certify_power_bound_on(f: ExtendedExpr, n: int, delta: float,
                            budget: int = _CERT_BUDGET) -> bool:
    """Certify |f(x)| < x^n on all of (0, delta]."""
    tau = delta * _TAIL_FACTOR
    if _tail_compare(f, n, tau) != "<":
        return False
    gap = _power_gap_tree(f, n)  # |f| - x^n, want strictly negative
    return _certify_sign_on(gap, tau, delta, "-", budget)


def check_power_bound(cand: FlatCandidate, n: int) -> ConditionReport:
    """Largest certified delta with |f(x)| < x^n on (0, delta].

    Candidate deltas are scanned on a dyadic grid; the winner is then
    pushed upward by bisection between the last certified and the first
    refuted value, so the reported delta approaches the true threshold
    instead of the nearest power of two.
    """
    if n <= 1:
        raise ValueError("power-bound condition requires n > 1")
    f = cand.f
    certified = None
    for k, delta in enumerate(_DELTA_GRID):
        if _sample_refutes_power(f, n, delta):
            continue
        if _certify_power_bound_on(f, n, delta):
            certified = delta
            ceiling = 1.0 if k == 0 else _DELTA_GRID[k - 1]
            break
    if certified is None:
        witness = _power_witness_below(f, n, _DELTA_FLOOR)
        if witness is not None:
            return ConditionReport(
                "power-bound", ConditionStatus.FALSIFIED, n=n, witness=witness,
                detail="|f| >= x^n below every candidate delta",
            )
        return ConditionReport(
            "power-bound", ConditionStatus.INCONCLUSIVE, n=n,
            detail="no delta certified within budget and no witness found",
        )
    lo, hi = certified, ceiling
    for _ in range(20):
        mid = lo + (hi - lo) / 2.0
        if not (lo < mid < hi):
            break
        if not _sample_refutes_power(f, n, mid) and _certify_power_bound_on(f, n, mid):
            lo = mid
        else:
            hi = mid
    return ConditionReport("power-bound", ConditionStatus.CERTIFIED, n=n,
                           delta=lo)


def _power_witness_below(f: ExtendedExpr, n: int, ceiling: float) -> Optional[float]:
    """Strongest re-verifiable violation of |f(x)| < x^n with x <= ceiling."""
    best = None
    best_margin = 0.0
    for j in range(1, 65):
        x = ceiling * j / 64.0
        try:
            lhs = abs(eval_point(f, x))
        except (DomainError, OverflowError):
            continue
        rhs = x ** n
        margin = lhs - rhs
        if margin > best_margin and _beyond_rounding(lhs, rhs):
            best = x
            best_margin = margin
    return best


# -- condition (ratio bound) -----------------------------------------------


def _ratio_samples():
    for j in range(1, 10_001):
        yield j / 10_000.0
    x = 1.0
    for _ in range(60):
        x *= 0.5
        yield x


def _ratio_witness(cand: FlatCandidate) -> Optional[float]:
    """Sample point maximizing the violation of C|f| >= |x f'|, if any."""
    f_prime = cand.f.base.deriv()
    best = None
    best_margin = 0.0
    for x in _ratio_samples():
        try:
            lhs = cand.C * abs(eval_point(cand.f, x))
            rhs = abs(x * eval_point(ExtendedExpr(f_prime, cand.f.zero_extended), x))
        except (DomainError, OverflowError):
            continue
        violation = rhs - lhs
        if violation > best_margin and _beyond_rounding(lhs, rhs):
            best = x
            best_margin = violation
    return best


def check_ratio_bound(cand: FlatCandidate) -> ConditionReport:
    """|x*f'(x)| <= C*|f(x)| on [0, 1].

    Exact families are decided structurally (for s*x^k the two sides have
    the exact ratio k, so blockwise arithmetic could never certify the
    equality case).  Otherwise: sampled falsification first, then a
    blockwise proof on [2^-20, 1]; a blockwise success without a tail
    certificate is reported as inconclusive, tagged certified-modulo-tail.
    """
    fam = _family_of(cand.f.base)
    if fam is not None and fam.kind == "zero":
        return ConditionReport("ratio-bound", ConditionStatus.CERTIFIED,
                               detail="f == 0")
    if fam is not None and fam.kind == "monomial":
        k = fam.degree
        if k <= cand.C:
            return ConditionReport(
                "ratio-bound", ConditionStatus.CERTIFIED,
                detail=f"|x*f'(x)| = {k}*|f(x)| exactly, {k} <= C",
            )
        witness = _ratio_witness(cand)
        return ConditionReport(
            "ratio-bound", ConditionStatus.FALSIFIED, witness=witness,
            detail=f"|x*f'(x)| = {k}*|f(x)| exactly, {k} > C",
        )
    witness = _ratio_witness(cand)
    if witness is not None:
        return ConditionReport("ratio-bound", ConditionStatus.FALSIFIED,
                               witness=witness)
    gap = _ratio_gap_tree(cand)
    blockwise_ok = _certify_sign_on_nonneg(gap, _RATIO_EPSILON, 1.0)
    if blockwise_ok:
        return ConditionReport(
            "ratio-bound", ConditionStatus.INCONCLUSIVE,
            detail="certified-modulo-tail: holds on [2^-20, 1]; "
                   "(0, 2^-20) undecided",
        )
    return ConditionReport(
        "ratio-bound", ConditionStatus.INCONCLUSIVE,
        detail="no falsifying sample; blockwise certification exhausted",
    )


def _certify_sign_on_nonneg(tree: ExtendedExpr, lo: float, hi: float,
                            budget: int = _CERT_BUDGET) -> bool:
    """Blockwise proof of tree >= 0 on [lo, hi] (non-strict)."""
    worklist = [(lo, hi)]
    used = 0
    while worklist:
        u, v = worklist.pop()
        used += 1
        if used > budget:
            return False
        enc = eval_interval(tree, Interval(u, v))
        if not is_indeterminate(enc) and enc.lo >= 0.0:
            continue
        mid = u + (v - u) / 2.0
        if not (u < mid < v):
            return False
        worklist.append((u, mid))
        worklist.append((mid, v))
    return True


# -- crossing locator -------------------------------------------------------


def _scan_grid(lo: float) -> list[float]:
    points: set[float] = {lo, 1.0}
    for j in range(1, 2049):
        x = j / 2048.0
        if x >= lo:
            points.add(x)
    ratio = (1.0 / lo) ** (1.0 / 600.0) if lo < 1.0 else 1.0
    x = lo
    for _ in range(600):
        x *= ratio
        if lo < x < 1.0:
            points.add(x)
    return sorted(points)


def _bisect_sign_change(gap: ExtendedExpr, lo: float, hi: float,
                        lo_sign: str) -> Interval:
    """Shrink [lo, hi] to width <= 2^-30 keeping a sign change inside."""
    while hi - lo > _BRACKET_WIDTH:
        mid = lo + (hi - lo) / 2.0
        if not (lo < mid < hi):
            break
        s = _point_sign(gap, mid)
        if s is None:
            # try slightly shifted probes before giving up
            for shift in (0.25, 0.75):
                alt = lo + (hi - lo) * shift
                s = _point_sign(gap, alt)
                if s is not None:
                    mid = alt
                    break
            if s is None:
                raise InconclusiveError(
                    "sign of |f| - x^n undecidable while narrowing a bracket"
                )
        if s == lo_sign:
            lo = mid
        else:
            hi = mid
    return Interval(lo, hi)


def locate_min_crossing(
    cand: FlatCandidate,
    n: int,
    power_report: Optional[ConditionReport] = None,
) -> Optional[Interval]:
    """Bracket of the smallest x in (0, 1] where |f(x)| reaches x^n.

    Returns None when |f| - x^n is certified strictly negative on the
    scanned region (up to a 2^-31 band before a right-endpoint tangency
    approached from below, which is not counted as a crossing).  Raises
    :class:`InconclusiveError` when neither a bracket nor emptiness can
    be certified.

    The minimality of a returned bracket is itself certified: the sign of
    |f| - x^n below the bracket is proved constant blockwise, with the
    (0, tau] tail handled by the structural certificates.
    """
    if n <= 1:
        raise ValueError("crossing search requires n > 1")
    if power_report is None:
        power_report = check_power_bound(cand, n)
    gap = _power_gap_tree(cand.f, n)

    if power_report.certified and power_report.delta:
        scan_lo = power_report.delta
        prev_x, prev_sign = scan_lo, "-"  # certified strictly below at delta
    else:
        scan_lo = _DELTA_FLOOR
        prev_x, prev_sign = None, None

    for x in _scan_grid(scan_lo):
        if prev_x is not None and x <= prev_x:
            continue
        s = _point_sign(gap, x)
        if s is None:
            continue
        if s == "0":
            if prev_sign == "+":
                # equality reached from above: first crossing is at or
                # just before this point
                lo_edge = max(x - 2.0 ** -31, prev_x if prev_x else 0.0)
                bracket = Interval(lo_edge, x)
                if _certify_below(cand.f, n, gap, "+", bracket.lo):
                    return bracket
                raise InconclusiveError(
                    "could not certify the region below the crossing"
                )
            # tangency from the certified-below side: not a crossing
            prev_x, prev_sign = x, prev_sign
            continue
        if prev_sign is not None and s != prev_sign:
            bracket = _bisect_sign_change(gap, prev_x, x, prev_sign)
            if _certify_below(cand.f, n, gap, prev_sign, bracket.lo):
                return bracket
            raise InconclusiveError(
                "sign change found but the region below it resists certification"
            )
        prev_x, prev_sign = x, s

    if prev_sign == "-":
        end = 1.0
        if _point_sign(gap, 1.0) != "-":
            end = 1.0 - 2.0 ** -31
        if _certify_below(cand.f, n, gap, "-", end):
            return None
        raise InconclusiveError("no crossing found but emptiness not certified")
    if prev_sign == "+":
        raise InconclusiveError(
            "|f| stays above x^n on the scanned region; no crossing to bracket"
        )
    raise InconclusiveError("no certified signs over the scan grid")


def _certify_below(f: ExtendedExpr, n: int, gap: ExtendedExpr, sign: str,
                   upto: float) -> bool:
    """Certify that |f| - x^n keeps ``sign`` on all of (0, upto]."""
    tau = upto * _TAIL_FACTOR
    want_tail = "<" if sign == "-" else ">"
    if _tail_compare(f, n, tau) != want_tail:
        return False
    return _certify_sign_on(gap, tau, upto, sign, budget=2 * _CERT_BUDGET)


# -- derivative boundedness -------------------------------------------------


def derivative_sup_bound(cand: FlatCandidate, lo: float = 2.0 ** -20,
                         hi: float = 1.0) -> float:
    """Certified finite upper bound of |f'| on [lo, hi].

    Subdivides up to a fixed block budget; raises InconclusiveError when a
    finite bound cannot be certified.
    """
    tree = ExtendedExpr(Abs(cand.f.base.deriv()), False)
    worklist = [(lo, hi)]
    used = 0
    bound = 0.0
    while worklist:
        u, v = worklist.pop()
        used += 1
        if used > 1024:
            raise InconclusiveError("no finite derivative bound within budget")
        enc = eval_interval(tree, Interval(u, v))
        if not is_indeterminate(enc) and enc.is_finite:
            bound = max(bound, enc.hi)
            continue
        mid = u + (v - u) / 2.0
        if not (u < mid < v):
            raise InconclusiveError("derivative bound: unsplittable block")
        worklist.append((u, mid))
        worklist.append((mid, v))
    return bound


# -- the inequality chain ----------------------------------------------------


@dataclass(frozen=True, slots=True)
class ChainStep:
    label: str
    relation: str
    lhs: Optional[Interval]
    rhs: Optional[Interval]
    holds: bool
    note: str = ""


@dataclass(frozen=True, slots=True)
class ChainTrace:
    n: int
    crossing: Optional[Interval]
    steps: tuple[ChainStep, ...]
    first_failure: Optional[str]
    conclusion: str


def _overlap(a: Interval, b: Interval) -> bool:
    return a.lo <= b.hi and b.lo <= a.hi


def evaluate_chain(cand: FlatCandidate, n: int) -> ChainTrace:
    """Walk the contradiction chain at the smallest crossing x* of |f| and
    x^n:

        x*^n = |f(x*)| = g(x*) - g(0)
             <= upper_int(|g'|) = upper_int(|f'|)
             <= int(C|f|/x)  <  (C/n) * x*^n  <  x*^n      (g = |f|)

    Each step carries certified enclosures where they are computable; a
    step whose justification is a falsified or uncertified hypothesis is
    marked failed with the hypothesis named.  The middle integral is never
    computed numerically: it is bounded by substituting |f| < x^n below
    x*, exactly as the power-bound certificate licenses.
    """
    if n <= cand.C:
        raise ValueError(f"chain requires n > C (n={n}, C={cand.C})")
    zero_rep = check_zero(cand)
    power_rep = check_power_bound(cand, n)
    ratio_rep = check_ratio_bound(cand)
    crossing = locate_min_crossing(cand, n, power_report=power_rep)

    if crossing is None:
        note = "" if power_rep.certified else " (power bound not certified)"
        return ChainTrace(
            n=n,
            crossing=None,
            steps=(),
            first_failure=None,
            conclusion=f"no crossing: |f(x)| < x^{n} on (0, 1]{note}",
        )

    steps: list[ChainStep] = []
    x = crossing
    xn = x.pow_int(n)
    f_abs = ExtendedExpr(Abs(cand.f.base), cand.f.zero_extended)
    fx = eval_interval(f_abs, x)
    if is_indeterminate(fx):
        raise InconclusiveError("|f| indeterminate on the crossing bracket")

    steps.append(ChainStep(
        label="x*^n == |f(x*)|",
        relation="==",
        lhs=xn,
        rhs=fx,
        holds=_overlap(xn, fx),
        note="definition of the crossing",
    ))

    steps.append(ChainStep(
        label="|f(x*)| == g(x*) - g(0) with g = |f|",
        relation="==",
        lhs=fx,
        rhs=fx,
        holds=zero_rep.certified,
        note="" if zero_rep.certified else f"zero condition {zero_rep.status.value}",
    ))

    # upper integral of |g'| over [0, x*]; g' = sign(f) * f'
    g_prime_abs = ExtendedExpr(
        Abs(Mul(Sign(cand.f.base), cand.f.base.deriv())), cand.f.zero_extended
    )
    tol = max(1e-12, xn.hi / 64.0) if math.isfinite(xn.hi) else 1e-9
    enc_g = enclose(ExpressionOracle(g_prime_abs), Interval(0.0, x.hi),
                    tol=tol, max_steps=20_000)
    note_g = "" if enc_g.converged else f"enclosure {enc_g.status.value}"
    steps.append(ChainStep(
        label="g(x*) - g(0) <= upper_integral(|g'|, [0, x*])",
        relation="<=",
        lhs=fx,
        rhs=enc_g.upper_integral,
        holds=fx.lo <= enc_g.upper_integral.hi,
        note=note_g,
    ))

    f_prime_abs = ExtendedExpr(Abs(cand.f.base.deriv()), cand.f.zero_extended)
    enc_f = enclose(ExpressionOracle(f_prime_abs), Interval(0.0, x.hi),
                    tol=tol, max_steps=20_000)
    steps.append(ChainStep(
        label="upper_integral(|g'|) == upper_integral(|f'|)",
        relation="==",
        lhs=enc_g.upper_integral,
        rhs=enc_f.upper_integral,
        holds=_overlap(enc_g.upper_integral, enc_f.upper_integral),
        note="|g'| = |f'| wherever g is differentiable",
    ))

    steps.append(ChainStep(
        label="upper_integral(|f'|, [0, x*]) <= integral(C*|f(x)|/x, [0, x*])",
        relation="<=",
        lhs=enc_f.upper_integral,
        rhs=None,
        holds=ratio_rep.certified,
        note="" if ratio_rep.certified
        else f"ratio-bound {ratio_rep.status.value}"
        + (f" (witness {ratio_rep.witness!r})" if ratio_rep.witness else ""),
    ))

    c_over_n = Interval.point(cand.C).div(Interval.point(float(n)))
    assert not is_indeterminate(c_over_n)
    bound = c_over_n * xn
    steps.append(ChainStep(
        label="integral(C*|f|/x, [0, x*]) < (C/n)*x*^n",
        relation="<",
        lhs=None,
        rhs=bound,
        holds=power_rep.certified,
        note="substitutes the certified |f| < x^n below x*"
        if power_rep.certified
        else f"power-bound {power_rep.status.value} for n={n}",
    ))

    steps.append(ChainStep(
        label="(C/n)*x*^n < x*^n",
        relation="<",
        lhs=bound,
        rhs=xn,
        holds=c_over_n.hi < 1.0,
        note="n > C",
    ))

    first_failure = next((s.label for s in steps if not s.holds), None)
    if first_failure is None:
        conclusion = ("all steps hold at the crossing: x*^n < x*^n, so the "
                      "certified conditions are mutually inconsistent")
    else:
        conclusion = f"chain breaks at: {first_failure}"
    return ChainTrace(
        n=n,
        crossing=crossing,
        steps=tuple(steps),
        first_failure=first_failure,
        conclusion=conclusion,
    )
