"""Sandwich checks for antiderivative increments.

For a bounded function h with an antiderivative H on [a, b], the increment
H(b) - H(a) lies between the lower and the upper Darboux integral of h,
whether or not h is Riemann integrable.  :func:`sandwich_check` verifies the
finite-partition shadow of that fact: lower sum <= H(b) - H(a) <= upper sum.
A failed verdict for valid inputs indicates a soundness bug in this
library, not a mathematical discovery.

:func:`ftc_reconstruct` recovers the increment as a converged integral
enclosure of H'; when the enclosure cannot converge (the derivative may
fail to be integrable) the sandwich bracket is still available on the
raised error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .darboux import (
    DEFAULT_MAX_STEPS,
    DarbouxEnclosure,
    ExpressionOracle,
    Partition,
    RangeOracle,
    darboux_sums,
    enclose,
)
from .expr import (
    ExtendedExpr,
    Expr,
    derivative,
    eval_interval,
    eval_point,
    eval_point_exact,
    is_rational_tree,
)
from .interval import DomainError, Interval, is_indeterminate

__all__ = [
    "SandwichVerdict",
    "sandwich_check",
    "ftc_reconstruct",
    "reconstruct_from_oracle",
    "increment",
    "UnverifiedHypothesisError",
    "NotConvergedError",
    "COMPARISON_ULPS",
]

# Inequality comparisons are widened by this many representable steps so the
# library's own directed rounding cannot produce false alarms.
COMPARISON_ULPS = 4

# Boundedness certification may subdivide the domain into at most this many
# blocks before giving up.
_BOUNDEDNESS_BLOCKS = 2 ** 10


class UnverifiedHypothesisError(RuntimeError):
    """Raised when boundedness of the derivative cannot be certified.

    This is a distinct outcome, not a refutation: the tool only reports
    what it can certify.
    """


class NotConvergedError(RuntimeError):
    """Integral enclosure did not reach the requested tolerance."""

    def __init__(self, message: str, enclosure: DarbouxEnclosure):
        super().__init__(message)
        self.enclosure = enclosure


@dataclass(frozen=True, slots=True)
class SandwichVerdict:
    lower_sum: float
    increment: float
    upper_sum: float
    passed: bool
    partition_size: int


def _widened(x: float, ulps: int = COMPARISON_ULPS) -> float:
    for _ in range(ulps):
        x = math.nextafter(x, math.inf)
    return x


def leq_widened(a: float, b: float, ulps: int = COMPARISON_ULPS) -> bool:
    """a <= b after stepping b up by ``ulps`` representable values."""
    return a <= _widened(b, ulps)


def increment(h_anti: Union[Expr, ExtendedExpr], a: float, b: float) -> float:
    """H(b) - H(a), exactly rounded when the tree is rational.

    Rational trees are evaluated over the rationals and the difference is
    rounded once, which avoids catastrophic cancellation; anything with a
    transcendental node falls back to float evaluation.
    """
    if is_rational_tree(h_anti):
        try:
            return float(eval_point_exact(h_anti, b) - eval_point_exact(h_anti, a))
        except DomainError:
            pass
    return eval_point(h_anti, b) - eval_point(h_anti, a)


def certify_bounded(fn: Union[Expr, ExtendedExpr], domain: Interval) -> Interval:
    """Certified finite enclosure of fn over domain, or raise.

    One interval evaluation over the whole domain; indeterminate or
    infinite pieces are bisected, up to a fixed block budget.
    """
    worklist = [domain]
    hull_lo, hull_hi = math.inf, -math.inf
    processed = 0
    while worklist:
        block = worklist.pop()
        processed += 1
        if processed > _BOUNDEDNESS_BLOCKS:
            raise UnverifiedHypothesisError(
                "could not certify boundedness within the subdivision budget"
            )
        enc = eval_interval(fn, block)
        if not is_indeterminate(enc) and enc.is_finite:
            hull_lo = min(hull_lo, enc.lo)
            hull_hi = max(hull_hi, enc.hi)
            continue
        mid = block.lo + (block.hi - block.lo) / 2.0
        if not (block.lo < mid < block.hi):
            raise UnverifiedHypothesisError(
                "unbounded or indeterminate on an unsplittable block "
                f"[{block.lo}, {block.hi}]"
            )
        worklist.append(Interval(block.lo, mid))
        worklist.append(Interval(mid, block.hi))
    return Interval(hull_lo, hull_hi)


def sandwich_check(
    h_anti: Union[Expr, ExtendedExpr],
    domain: Interval,
    partition: Partition,
) -> SandwichVerdict:
    """Check lower sum of H' <= H(b) - H(a) <= upper sum of H' on the
    given partition, with comparisons widened by COMPARISON_ULPS."""
    if partition.a != domain.lo or partition.b != domain.hi:
        raise ValueError("partition endpoints do not match the domain")
    h = derivative(h_anti)
    certify_bounded(h, domain)  # hypothesis: H' must be bounded
    low, high = darboux_sums(ExpressionOracle(h), partition)
    delta = increment(h_anti, domain.lo, domain.hi)
    passed = leq_widened(low, delta) and leq_widened(delta, high)
    return SandwichVerdict(
        lower_sum=low,
        increment=delta,
        upper_sum=high,
        passed=passed,
        partition_size=partition.size,
    )


# ftc_reconstruct needs enough budget for tolerances around 1e-5: the sum
# gap for a Lipschitz integrand shrinks like 1/steps.
FTC_MAX_STEPS = 500_000


def reconstruct_from_oracle(
    oracle: RangeOracle,
    domain: Interval,
    tol: float,
    max_steps: int = FTC_MAX_STEPS,
) -> Interval:
    enc = enclose(oracle, domain, tol=tol, max_steps=max_steps)
    if not enc.converged:
        raise NotConvergedError(
            "integral enclosure did not converge; the integrand may not be "
            "integrable (the sandwich bracket is still valid)",
            enc,
        )
    return enc.lower_integral


def ftc_reconstruct(
    h_anti: Union[Expr, ExtendedExpr],
    domain: Interval,
    tol: float,
    max_steps: int = FTC_MAX_STEPS,
) -> Interval:
    """Converged enclosure of the integral of H' over the domain.

    The bracket contains H(b) - H(a) whenever the enclosure converges.
    Raises :class:`NotConvergedError` (with the best enclosure attached)
    when the gap cannot be closed.
    """
    h = derivative(h_anti)
    return reconstruct_from_oracle(ExpressionOracle(h), domain, tol, max_steps)
