"""rigint: certified Darboux integral enclosures and related checkers."""

from .interval import (
    EMPTY,
    INDETERMINATE,
    DomainError,
    Interval,
    is_indeterminate,
    monotone_env,
)
from .expr import (
    ExtendedExpr,
    derivative,
    differentiate,
    eval_interval,
    eval_point,
    eval_point_exact,
    to_infix,
)
from .parser import ParseError, parse
from .darboux import (
    DarbouxEnclosure,
    DirichletOracle,
    EnclosureStatus,
    ExpressionOracle,
    Partition,
    ThomaeOracle,
    enclose,
    lower_sum,
    refine_once,
    upper_sum,
)
from .volterra import (
    NotConvergedError,
    SandwichVerdict,
    UnverifiedHypothesisError,
    ftc_reconstruct,
    sandwich_check,
)
from .flatness import (
    ChainStep,
    ChainTrace,
    ConditionReport,
    ConditionStatus,
    FlatCandidate,
    InconclusiveError,
    check_power_bound,
    check_ratio_bound,
    check_zero,
    derivative_sup_bound,
    evaluate_chain,
    locate_min_crossing,
)

__version__ = "0.1.0"
