"""Command-line front end.

Three subcommands: ``enclose`` (integral enclosure of an expression or a
built-in oracle), ``volterra`` (sandwich checks of lower sum <= increment
<= upper sum over configured partitions), and ``flatness`` (condition
checks, crossing location, and the inequality chain).  Reports are JSON on
stdout or to --json-out; refinement histories export as CSV.

Exit codes:
  enclose   0 converged, 2 not converged/inconclusive, 1 input error
  volterra  0 all pass, 2 a check failed, 3 boundedness unverified,
            1 input error
  flatness  0 all certified/consistent, 2 something inconclusive,
            4 a hypothesis falsified, 1 input error
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import random
import sys
from datetime import datetime, timezone
from typing import Optional

from . import __version__
from .darboux import (
    DEFAULT_MAX_STEPS,
    DEFAULT_TOL,
    DarbouxEnclosure,
    DirichletOracle,
    ExpressionOracle,
    Partition,
    ThomaeOracle,
    enclose,
)
from .expr import ExtendedExpr
from .flatness import (
    ChainTrace,
    ConditionReport,
    ConditionStatus,
    FlatCandidate,
    InconclusiveError,
    check_power_bound,
    check_ratio_bound,
    check_zero,
    evaluate_chain,
    locate_min_crossing,
)
from .interval import DomainError, Interval
from .parser import ParseError, parse
from .volterra import UnverifiedHypothesisError, sandwich_check

_ORACLES = {"dirichlet": DirichletOracle, "thomae-like": ThomaeOracle}

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOT_CONVERGED = 2
EXIT_CHECK_FAILED = 2
EXIT_INCONCLUSIVE = 2
EXIT_UNVERIFIED = 3
EXIT_FALSIFIED = 4


def _num(x: float):
    """JSON-safe number: infinities become strings."""
    if x != x:
        return None
    if x == math.inf:
        return "inf"
    if x == -math.inf:
        return "-inf"
    return x


def _interval_json(iv: Optional[Interval]):
    if iv is None:
        return None
    return {"lo": _num(iv.lo), "hi": _num(iv.hi)}


def _report_json(rep: ConditionReport):
    out = {"condition": rep.condition, "status": rep.status.value}
    if rep.n is not None:
        out["n"] = rep.n
    if rep.witness is not None:
        out["witness"] = _num(rep.witness)
    if rep.delta is not None:
        out["delta"] = _num(rep.delta)
    if rep.detail:
        out["detail"] = rep.detail
    return out


def _chain_json(trace: ChainTrace):
    return {
        "n": trace.n,
        "crossing": _interval_json(trace.crossing),
        "first_failure": trace.first_failure,
        "conclusion": trace.conclusion,
        "steps": [
            {
                "label": s.label,
                "relation": s.relation,
                "lhs": _interval_json(s.lhs),
                "rhs": _interval_json(s.rhs),
                "holds": s.holds,
                "note": s.note,
            }
            for s in trace.steps
        ],
    }


def _emit(report: dict, json_out: Optional[str]) -> None:
    text = json.dumps(report, indent=2, sort_keys=True)
    if json_out:
        with open(json_out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _write_history_csv(path: str, enclosure: DarbouxEnclosure) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "lower_sum", "upper_sum"])
        for rec in enclosure.history:
            writer.writerow([rec.step, repr(rec.lower), repr(rec.upper)])


def _envelope(command: str, config: dict, result: dict) -> dict:
    return {
        "command": command,
        "tool_version": __version__,
        "generated_at": datetime.now(timezone.utc).isoformat(),
        "config": config,
        "result": result,
    }


def _default_max_steps() -> int:
    env = os.environ.get("DARBOUX_MAX_STEPS")
    if env is not None:
        try:
            value = int(env)
            if value >= 1:
                return value
        except ValueError:
            pass
        print(f"ignoring invalid DARBOUX_MAX_STEPS={env!r}", file=sys.stderr)
    return DEFAULT_MAX_STEPS


def _parse_expression(text: str, zero_extend: bool) -> ExtendedExpr:
    return ExtendedExpr(parse(text), zero_extend)


def cmd_enclose(args) -> int:
    if args.tol <= 0:
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_INPUT
    if not (math.isfinite(args.a) and math.isfinite(args.b) and args.a < args.b):
        print("error: need finite endpoints with a < b", file=sys.stderr)
        return EXIT_INPUT
    if args.oracle:
        oracle = _ORACLES[args.oracle]()
        source = {"oracle": args.oracle}
    else:
        fn = _parse_expression(args.f, args.zero_extend)
        oracle = ExpressionOracle(fn)
        source = {"expression": args.f, "zero_extend": args.zero_extend}
    domain = Interval(args.a, args.b)
    enc = enclose(oracle, domain, tol=args.tol, max_steps=args.max_steps)
    config = {
        **source,
        "a": args.a,
        "b": args.b,
        "tol": args.tol,
        "max_steps": args.max_steps,
    }
    result = {
        "status": enc.status.value,
        "converged": enc.converged,
        "lower_integral": _interval_json(enc.lower_integral),
        "upper_integral": _interval_json(enc.upper_integral),
        "gap": _num(enc.gap),
        "partition_size": enc.partition_size,
        "refinement_steps": enc.refinement_steps,
    }
    _emit(_envelope("enclose", config, result), args.json_out)
    if args.csv_out:
        _write_history_csv(args.csv_out, enc)
    return EXIT_OK if enc.converged else EXIT_NOT_CONVERGED


def cmd_volterra(args) -> int:
    if not (math.isfinite(args.a) and math.isfinite(args.b) and args.a < args.b):
        print("error: need finite endpoints with a < b", file=sys.stderr)
        return EXIT_INPUT
    if not args.uniform and not args.random:
        print("error: configure at least one partition "
              "(--uniform N and/or --random N)", file=sys.stderr)
        return EXIT_INPUT
    h_anti = _parse_expression(args.H, False)
    domain = Interval(args.a, args.b)
    rng = random.Random(args.seed)
    partitions: list[tuple[str, Partition]] = []
    for n in args.uniform or []:
        if n < 1:
            print("error: --uniform needs a positive block count", file=sys.stderr)
            return EXIT_INPUT
        partitions.append((f"uniform-{n}", Partition.uniform(args.a, args.b, n)))
    for n in args.random or []:
        if n < 1:
            print("error: --random needs a positive block count", file=sys.stderr)
            return EXIT_INPUT
        partitions.append(
            (f"random-{n}(seed={args.seed})", Partition.random(args.a, args.b, n, rng))
        )
    checks = []
    for label, part in partitions:
        verdict = sandwich_check(h_anti, domain, part)
        checks.append({
            "partition": label,
            "partition_size": verdict.partition_size,
            "lower_sum": _num(verdict.lower_sum),
            "increment": _num(verdict.increment),
            "upper_sum": _num(verdict.upper_sum),
            "pass": verdict.passed,
        })
    all_passed = all(c["pass"] for c in checks)
    config = {
        "antiderivative": args.H,
        "a": args.a,
        "b": args.b,
        "uniform": args.uniform or [],
        "random": args.random or [],
        "seed": args.seed,
    }
    result = {"checks": checks, "all_passed": all_passed}
    _emit(_envelope("volterra", config, result), args.json_out)
    return EXIT_OK if all_passed else EXIT_CHECK_FAILED


def cmd_flatness(args) -> int:
    if args.C <= 0:
        print("error: --C must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        n_values = [int(part) for part in args.n.split(",") if part.strip()]
    except ValueError:
        print(f"error: --n expects integers, got {args.n!r}", file=sys.stderr)
        return EXIT_INPUT
    if not n_values or any(n <= 1 for n in n_values):
        print("error: every n must be an integer > 1", file=sys.stderr)
        return EXIT_INPUT
    fn = _parse_expression(args.f, args.zero_extend)
    cand = FlatCandidate(fn, args.C)

    reports = [check_zero(cand)]
    power_reports = {}
    for n in n_values:
        rep = check_power_bound(cand, n)
        power_reports[n] = rep
        reports.append(rep)
    reports.append(check_ratio_bound(cand))

    crossings = []
    chains = []
    inconclusive_events = 0
    for n in n_values:
        try:
            bracket = locate_min_crossing(cand, n, power_report=power_reports[n])
            crossings.append({"n": n, "bracket": _interval_json(bracket),
                              "found": bracket is not None})
        except InconclusiveError as exc:
            inconclusive_events += 1
            crossings.append({"n": n, "bracket": None, "found": None,
                              "detail": str(exc)})
        if n > cand.C:
            try:
                chains.append(_chain_json(evaluate_chain(cand, n)))
            except InconclusiveError as exc:
                inconclusive_events += 1
                chains.append({"n": n, "inconclusive": str(exc)})
        else:
            chains.append({"n": n, "skipped": f"chain requires n > C (C={cand.C})"})

    statuses = [rep.status for rep in reports]
    if any(s is ConditionStatus.FALSIFIED for s in statuses):
        exit_code = EXIT_FALSIFIED
        overall = "falsified"
    elif inconclusive_events or any(s is ConditionStatus.INCONCLUSIVE for s in statuses):
        exit_code = EXIT_INCONCLUSIVE
        overall = "inconclusive"
    else:
        exit_code = EXIT_OK
        overall = "certified"
    config = {
        "function": args.f,
        "zero_extend": args.zero_extend,
        "C": args.C,
        "n": n_values,
    }
    result = {
        "overall": overall,
        "conditions": [_report_json(rep) for rep in reports],
        "crossings": crossings,
        "chains": chains,
    }
    _emit(_envelope("flatness", config, result), args.json_out)
    return exit_code


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="rigint",
        description="certified Darboux integral enclosures and flat-function checks",
    )
    top.add_argument("--version", action="version", version=f"rigint {__version__}")
    sub = top.add_subparsers(dest="command", required=True)

    p_enc = sub.add_parser("enclose", help="certified integral enclosure")
    group = p_enc.add_mutually_exclusive_group(required=True)
    group.add_argument("--f", help="expression for the integrand")
    group.add_argument("--oracle", choices=sorted(_ORACLES),
                       help="built-in range oracle")
    p_enc.add_argument("--a", type=float, required=True)
    p_enc.add_argument("--b", type=float, required=True)
    p_enc.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p_enc.add_argument("--max-steps", type=int, default=_default_max_steps())
    p_enc.add_argument("--zero-extend", action="store_true",
                       help="define the function as 0 at x = 0")
    p_enc.add_argument("--json-out")
    p_enc.add_argument("--csv-out", help="write step,lower_sum,upper_sum history")
    p_enc.set_defaults(fn=cmd_enclose)

    p_vol = sub.add_parser("volterra", help="sandwich checks for an antiderivative")
    p_vol.add_argument("--H", required=True, help="expression for the antiderivative")
    p_vol.add_argument("--a", type=float, required=True)
    p_vol.add_argument("--b", type=float, required=True)
    p_vol.add_argument("--uniform", type=int, action="append",
                       help="add a uniform partition with N blocks (repeatable)")
    p_vol.add_argument("--random", type=int, action="append",
                       help="add a seeded random partition with N blocks (repeatable)")
    p_vol.add_argument("--seed", type=int, default=0)
    p_vol.add_argument("--json-out")
    p_vol.set_defaults(fn=cmd_volterra)

    p_flat = sub.add_parser("flatness", help="flat-function condition checks")
    p_flat.add_argument("--f", required=True, help="candidate expression")
    p_flat.add_argument("--zero-extend", action="store_true")
    p_flat.add_argument("--C", type=float, required=True,
                        help="ratio-bound constant")
    p_flat.add_argument("--n", required=True,
                        help="comma-separated list of exponents > 1")
    p_flat.add_argument("--json-out")
    p_flat.set_defaults(fn=cmd_flatness)
    return top


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as exc:
        print(f"syntax error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except UnverifiedHypothesisError as exc:
        print(f"unverified-hypothesis: {exc}", file=sys.stderr)
        return EXIT_UNVERIFIED
    except (DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def entry() -> None:
    sys.exit(main())
