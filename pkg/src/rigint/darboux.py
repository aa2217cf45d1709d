"""Partitions, directed Darboux sums, and adaptive integral enclosures.

A :class:`RangeOracle` supplies certified inf/sup bounds of a function on
any subinterval; the sums built from those bounds are rounded so that every
computed lower sum is <= the true lower sum (hence <= the lower integral)
and every computed upper sum is >= the true upper sum restricted to
refinements (hence >= the upper integral).

:func:`enclose` refines adaptively: split the block with the largest
oscillation mass (M - m) * width, leftmost on ties, bisecting at the
midpoint, until the sum gap reaches the tolerance or a budget runs out.
Since lower integral <= upper integral, the final pair of sums brackets
both integrals; the bracket is deliberately conservative for functions
whose lower and upper integrals differ.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Protocol, Sequence, Union

from .expr import ExtendedExpr, Expr, eval_interval
from .interval import EMPTY, Interval, is_indeterminate, sum_down, sum_up

__all__ = [
    "Partition",
    "RangeOracle",
    "ExpressionOracle",
    "DirichletOracle",
    "ThomaeOracle",
    "lower_sum",
    "upper_sum",
    "refine_once",
    "enclose",
    "DarbouxEnclosure",
    "EnclosureStatus",
    "ConvergenceRecord",
    "DEFAULT_TOL",
    "DEFAULT_MAX_STEPS",
    "MIN_WIDTH_FACTOR",
]

DEFAULT_TOL = 1e-6
DEFAULT_MAX_STEPS = 100_000
# Blocks narrower than this fraction of the domain are never split further.
MIN_WIDTH_FACTOR = 2.0 ** -40


@dataclass(frozen=True, slots=True)
class Partition:
    """Strictly increasing breakpoints a = p0 < p1 < ... < pk = b."""

    points: tuple[float, ...]

    def __post_init__(self):
        pts = tuple(float(p) for p in self.points)
        if len(pts) < 2:
            raise ValueError("partition needs at least two points")
        if any(not math.isfinite(p) for p in pts):
            raise ValueError("partition points must be finite")
        if any(u >= v for u, v in zip(pts, pts[1:])):
            raise ValueError("partition points must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @staticmethod
    def uniform(a: float, b: float, subintervals: int) -> "Partition":
        if subintervals < 1:
            raise ValueError("need at least one subinterval")
        pts = [a + (b - a) * i / subintervals for i in range(subintervals + 1)]
        pts[0], pts[-1] = a, b
        return Partition(tuple(pts))

    @staticmethod
    def random(a: float, b: float, subintervals: int, rng) -> "Partition":
        """Seeded random partition with the requested number of blocks."""
        interior: set[float] = set()
        while len(interior) < subintervals - 1:
            p = a + (b - a) * rng.random()
            if a < p < b:
                interior.add(p)
        return Partition(tuple([a, *sorted(interior), b]))

    @property
    def a(self) -> float:
        return self.points[0]

    @property
    def b(self) -> float:
        return self.points[-1]

    @property
    def size(self) -> int:
        """Number of subintervals."""
        return len(self.points) - 1

    def blocks(self):
        for u, v in zip(self.points, self.points[1:]):
            yield Interval(u, v)

    def refines(self, other: "Partition") -> bool:
        return set(other.points) <= set(self.points)


class RangeOracle(Protocol):
    """Certified range bounds: m <= inf f <= sup f <= M on the queried block."""

    def bounds(self, sub: Interval) -> tuple[float, float]: ...


class ExpressionOracle:
    """Range oracle backed by interval evaluation of an expression tree.

    An indeterminate evaluation (zero-containing divisor) is reported as
    the uninformative bounds (-inf, +inf), which adaptive refinement then
    targets first.
    """

    def __init__(self, fn: Union[Expr, ExtendedExpr]):
        self.fn = fn if isinstance(fn, ExtendedExpr) else ExtendedExpr(fn, False)

    def bounds(self, sub: Interval) -> tuple[float, float]:
        enc = eval_interval(self.fn, sub)
        if is_indeterminate(enc) or enc is EMPTY:
            return (-math.inf, math.inf)
        return (enc.lo, enc.hi)


class DirichletOracle:
    """Bounds of an indicator-of-a-dense-set style function: inf 0, sup 1 on
    every block.  Its lower and upper integrals over [0,1] are 0 and 1; no
    refinement can close the gap."""

    def bounds(self, sub: Interval) -> tuple[float, float]:
        return (0.0, 1.0)


class ThomaeOracle:
    """Bounds for the function that is 1/q at rationals p/q and 0 elsewhere.

    inf is 0 on any block (irrationals are dense); sup is 1/q for the
    smallest denominator q admitting a fraction inside the block, so upper
    sums do converge to 0 under refinement, unlike the Dirichlet case.
    """

    def __init__(self, max_denominator: int = 1 << 16):
        self.max_denominator = max_denominator

    def bounds(self, sub: Interval) -> tuple[float, float]:
        for q in range(1, self.max_denominator + 1):
            if math.floor(sub.hi * q) >= math.ceil(sub.lo * q):
                return (0.0, 1.0 / q)
        return (0.0, 1.0 / self.max_denominator)


def _term_lo(bound: float, u: float, v: float) -> float:
    """Lower bound of bound * (v - u), outward rounding on the width too."""
    if not math.isfinite(bound):
        return bound
    if bound == 0.0:
        return 0.0
    w = v - u
    w_lo = math.nextafter(w, -math.inf)
    w_hi = math.nextafter(w, math.inf)
    return math.nextafter(min(bound * w_lo, bound * w_hi), -math.inf)


def _term_hi(bound: float, u: float, v: float) -> float:
    if not math.isfinite(bound):
        return bound
    if bound == 0.0:
        return 0.0
    w = v - u
    w_lo = math.nextafter(w, -math.inf)
    w_hi = math.nextafter(w, math.inf)
    return math.nextafter(max(bound * w_lo, bound * w_hi), math.inf)


def _block_terms(oracle: RangeOracle, partition: Partition):
    lows = []
    highs = []
    for u, v in zip(partition.points, partition.points[1:]):
        m, big_m = oracle.bounds(Interval(u, v))
        lows.append(_term_lo(m, u, v))
        highs.append(_term_hi(big_m, u, v))
    return lows, highs


def darboux_sums(oracle: RangeOracle, partition: Partition) -> tuple[float, float]:
    """(lower sum rounded down, upper sum rounded up) with one oracle query
    per block."""
    lows, highs = _block_terms(oracle, partition)
    return sum_down(lows), sum_up(highs)


def lower_sum(oracle: RangeOracle, partition: Partition) -> float:
    """Sum of m_i * dx_i, rounded down: a certified lower bound for the
    lower integral."""
    lows, _ = _block_terms(oracle, partition)
    return sum_down(lows)


def upper_sum(oracle: RangeOracle, partition: Partition) -> float:
    """Sum of M_i * dx_i, rounded up: a certified upper bound for the
    upper integral."""
    _, highs = _block_terms(oracle, partition)
    return sum_up(highs)


def _oscillation(m: float, big_m: float, u: float, v: float) -> float:
    osc = big_m - m
    if math.isnan(osc) or osc == math.inf:
        return math.inf
    return osc * (v - u)


def refine_once(oracle: RangeOracle, partition: Partition) -> Partition:
    """Add one midpoint to the block maximizing (M - m) * width (leftmost on
    ties).  Returns the partition unchanged when that block cannot be split
    at a representable interior point."""
    best_idx = 0
    best_osc = -math.inf
    pts = partition.points
    for i, (u, v) in enumerate(zip(pts, pts[1:])):
        m, big_m = oracle.bounds(Interval(u, v))
        osc = _oscillation(m, big_m, u, v)
        if osc > best_osc:
            best_osc = osc
            best_idx = i
    u, v = pts[best_idx], pts[best_idx + 1]
    mid = u + (v - u) / 2.0
    if not (u < mid < v):
        return partition
    return Partition(tuple([*pts[: best_idx + 1], mid, *pts[best_idx + 1 :]]))


class EnclosureStatus(Enum):
    CONVERGED = "converged"
    NOT_CONVERGED = "not_converged"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True, slots=True)
class ConvergenceRecord:
    step: int
    lower: float
    upper: float


@dataclass(frozen=True, slots=True)
class DarbouxEnclosure:
    """Certified bracket around both the lower and the upper integral.

    ``lower_integral`` and ``upper_integral`` both equal
    [best lower sum, best upper sum]: each lower sum certifies a lower
    bound of the lower integral, each upper sum an upper bound of the
    upper integral, and the opposite sides follow from
    lower integral <= upper integral.  For non-integrable functions the
    common bracket is conservative by exactly the Darboux gap.
    """

    lower_integral: Interval
    upper_integral: Interval
    partition_size: int
    refinement_steps: int
    status: EnclosureStatus
    history: tuple[ConvergenceRecord, ...] = field(repr=False, default=())

    @property
    def converged(self) -> bool:
        return self.status is EnclosureStatus.CONVERGED

    @property
    def gap(self) -> float:
        return self.lower_integral.hi - self.lower_integral.lo


def _plain_total(terms) -> float:
    total = 0.0
    for t in terms:
        total += t
    return total


class _Block:
    __slots__ = ("u", "v", "m", "M", "t_lo", "t_hi")

    def __init__(self, u, v, m, M, t_lo, t_hi):
        self.u = u
        self.v = v
        self.m = m
        self.M = M
        self.t_lo = t_lo
        self.t_hi = t_hi


def _make_block(oracle: RangeOracle, u: float, v: float) -> _Block:
    m, big_m = oracle.bounds(Interval(u, v))
    return _Block(u, v, m, big_m, _term_lo(m, u, v), _term_hi(big_m, u, v))


def enclose(
    oracle: RangeOracle,
    domain: Interval,
    tol: float = DEFAULT_TOL,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> DarbouxEnclosure:
    """Adaptively refine until upper - lower <= tol or a budget is hit.

    The loop is driven by cheaply maintained running sums; certified sums
    (directed per-term rounding, exactly rounded accumulation) are
    recomputed at convergence checkpoints and at exit, and those are what
    the returned brackets use.  History records the running sums per step.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    if not domain.is_finite or domain.lo >= domain.hi:
        raise ValueError("domain must be a finite interval of positive width")

    a, b = domain.lo, domain.hi
    min_width = MIN_WIDTH_FACTOR * (b - a)

    blocks: dict[int, _Block] = {}
    heap: list[tuple[float, float, int]] = []
    next_key = 0

    def add_block(u: float, v: float) -> _Block:
        nonlocal next_key
        blk = _make_block(oracle, u, v)
        key = next_key
        next_key += 1
        blocks[key] = blk
        heapq.heappush(heap, (-_oscillation(blk.m, blk.M, u, v), u, key))
        return blk

    first = add_block(a, b)
    running_lo, running_hi = first.t_lo, first.t_hi

    def certified() -> tuple[float, float]:
        items = sorted(blocks.values(), key=lambda blk: blk.u)
        return (sum_down([blk.t_lo for blk in items]),
                sum_up([blk.t_hi for blk in items]))

    best_lo, best_hi = certified()
    history = [ConvergenceRecord(0, running_lo, running_hi)]
    steps = 0
    status = None
    check_gap = tol

    while True:
        if running_hi - running_lo <= check_gap:
            cert_lo, cert_hi = certified()
            best_lo = max(best_lo, cert_lo)
            best_hi = min(best_hi, cert_hi)
            if best_hi - best_lo <= tol:
                status = EnclosureStatus.CONVERGED
                break
            # running sums drifted; demand a slightly smaller running gap
            check_gap = max((running_hi - running_lo) - ((best_hi - best_lo) - tol) * 1.25,
                            check_gap * 0.5)
        if steps >= max_steps:
            status = EnclosureStatus.NOT_CONVERGED
            break

        # pop the live block with maximal oscillation mass, leftmost on ties
        while heap:
            neg_osc, u, key = heap[0]
            if key in blocks:
                break
            heapq.heappop(heap)
        blk = blocks[key]
        mid = blk.u + (blk.v - blk.u) / 2.0
        if (blk.v - blk.u) <= min_width or not (blk.u < mid < blk.v):
            unresolved = not (math.isfinite(blk.m) and math.isfinite(blk.M))
            status = EnclosureStatus.INCONCLUSIVE if unresolved else EnclosureStatus.NOT_CONVERGED
            break
        heapq.heappop(heap)
        del blocks[key]
        left = add_block(blk.u, mid)
        right = add_block(mid, blk.v)
        if math.isfinite(blk.t_lo) and math.isfinite(left.t_lo) and math.isfinite(right.t_lo):
            running_lo += (left.t_lo + right.t_lo) - blk.t_lo
        else:
            running_lo = _plain_total(blk.t_lo for blk in blocks.values())
        if math.isfinite(blk.t_hi) and math.isfinite(left.t_hi) and math.isfinite(right.t_hi):
            running_hi += (left.t_hi + right.t_hi) - blk.t_hi
        else:
            running_hi = _plain_total(blk.t_hi for blk in blocks.values())
        steps += 1
        history.append(ConvergenceRecord(steps, running_lo, running_hi))

    cert_lo, cert_hi = certified()
    best_lo = max(best_lo, cert_lo)
    best_hi = min(best_hi, cert_hi)
    bracket = Interval(best_lo, max(best_lo, best_hi))
    return DarbouxEnclosure(
        lower_integral=bracket,
        upper_integral=bracket,
        partition_size=len(blocks),
        refinement_steps=steps,
        status=status,
        history=tuple(history),
    )
