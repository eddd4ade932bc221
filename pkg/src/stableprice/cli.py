"""Command-line front end.

Exit codes: 0 success, 1 negative verdict (not stable, infeasible, failed
check), 2 input error, 3 size cap exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from typing import Any, Sequence

from . import io
from .algorithms import budget_additive_approx, single_minded_greedy_stable
from .configlp import fractional_opt, integral_opt
from .instances import RANDOM_CLASSES, GeneratorParams
from .itemset import DEMAND_CAP, CapExceeded, items_of, mask_of, popcount
from .rational import parse_rational
from .reproduce import (
    reproduce_budget_additive,
    reproduce_cross_check,
    reproduce_greedy,
    reproduce_single_minded,
    reproduce_solvers,
    reproduce_submodular,
    reproduce_xos,
)
from .stability import (
    Outcome,
    best_stable_outcome,
    extract_stable_outcome,
    prices_for_allocation,
    stable_exists_on,
    verify_stable,
)
from .valuations import Market, MarketError

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


def parse_items(text: str) -> int:
    """``--items`` value: a bit mask ("11", "0b1011") or an index list ("0,1,3", "[3]")."""
    text = text.strip()
    if text.startswith("[") or "," in text:
        body = text.strip("[]")
        try:
            idx = [int(x) for x in body.split(",") if x.strip()]
        except ValueError:
            raise MarketError(f"malformed item list {text!r}") from None
        if any(j < 0 for j in idx):
            raise MarketError("negative item index")
        return mask_of(idx)
    try:
        mask = int(text, 0)
    except ValueError:
        raise MarketError(f"malformed item mask {text!r}") from None
    if mask < 0:
        raise MarketError("negative item mask")
    return mask


def _items(args, market: Market) -> int:
    items = market.items if args.items is None else parse_items(args.items)
    if items & ~market.items:
        raise MarketError(f"--items names items outside 0..{market.m - 1}")
    if popcount(items) > args.cap:
        raise CapExceeded(f"{popcount(items)} items exceeds --cap {args.cap}")
    return items


def _outcome(market: Market, out: Outcome) -> dict:
    return {**io.outcome_to_doc(out.allocation, out.prices), "welfare": out.welfare}


def _load(args) -> Market:
    return io.parse_market(args.market)


# ---------------------------------------------------------------------------
# subcommands: each returns (results, exit code)

def cmd_gap(args) -> tuple[Any, int]:
    market = _load(args)
    items = _items(args, market)
    lp = fractional_opt(market, items)
    alloc, integral = integral_opt(market, items)
    frac = lp.optimal_value
    gap = Fraction(1) if integral == 0 else frac / integral
    return {
        "items": items_of(items),
        "fractional": frac,
        "integral": integral,
        "gap": gap,
        "integral_allocation": io.allocation_to_doc(alloc),
        "prices": [lp.dual_item[j] for j in items_of(items)],
        "utilities": list(lp.dual_buyer),
    }, EXIT_OK


def cmd_stable_exists(args):
    market = _load(args)
    items = _items(args, market)
    verdict = stable_exists_on(market, items)
    return {"items": items_of(items), "stable_exists": verdict}, EXIT_OK if verdict else EXIT_NEGATIVE


def cmd_extract(args):
    market = _load(args)
    items = _items(args, market)
    if not stable_exists_on(market, items):
        return {"items": items_of(items), "stable_exists": False}, EXIT_NEGATIVE
    out = extract_stable_outcome(market, items)
    return {"items": items_of(items), "stable_exists": True, "outcome": _outcome(market, out)}, EXIT_OK


def cmd_verify(args):
    market = _load(args)
    alloc, prices = io.parse_outcome(args.outcome, market)
    report = verify_stable(market, alloc, prices)
    witness = None
    if report.witness is not None:
        i, S = report.witness
        witness = {"buyer": i, "set": items_of(S)}
    return {"stable": report.stable, "witness": witness,
            "max_utilities": list(report.max_utilities)}, EXIT_OK if report.stable else EXIT_NEGATIVE


def cmd_best_stable(args):
    market = _load(args)
    best = best_stable_outcome(market)
    _, opt = integral_opt(market)
    ratio: Any
    if best.welfare == 0:
        ratio = Fraction(1) if opt == 0 else "inf"
    else:
        ratio = opt / best.welfare
    return {"optimum": opt, "best_stable": _outcome(market, best), "ratio": ratio}, EXIT_OK


def cmd_prices_for(args):
    market = _load(args)
    alloc, _ = io.parse_outcome(args.allocation, market, need_prices=False)
    prices = prices_for_allocation(market, alloc)
    if prices is None:
        return {"allocation": io.allocation_to_doc(alloc), "feasible": False}, EXIT_NEGATIVE
    return {"allocation": io.allocation_to_doc(alloc), "feasible": True, "prices": list(prices)}, EXIT_OK


def cmd_approx_ba(args):
    market = _load(args)
    res = budget_additive_approx(market)
    return {
        "case": res.case,
        "swapped": res.swapped,
        **io.outcome_to_doc(res.allocation, res.prices),
        "welfare": res.welfare,
        "opt_upper_bound": res.opt_upper,
        "budgets": [res.b1, res.b2],
        "buyer1_total_value": res.v1_total,
        "s1": items_of(res.s1),
        "d2": items_of(res.d2),
    }, EXIT_OK


def cmd_greedy_sm(args):
    market = _load(args)
    return {"outcome": _outcome(market, single_minded_greedy_stable(market))}, EXIT_OK


def cmd_gen(args):
    variant = args.variant.replace("-", "_")
    classes = tuple(args.classes.split(",")) if args.classes else RANDOM_CLASSES
    params = GeneratorParams(variant, k=args.k, m=args.m, n=args.n,
                             delta=None if args.delta is None else parse_rational(args.delta),
                             eps=None if args.eps is None else parse_rational(args.eps),
                             seed=args.seed, classes=classes)
    return params.build(), EXIT_OK


def cmd_reproduce(args):
    which = args.scenario
    if which == "xos":
        sc = reproduce_xos(args.m or 5, parse_rational(args.delta or "1/100"))
    elif which == "submodular":
        eps = None if args.eps is None else parse_rational(args.eps)
        sc = reproduce_submodular(args.k or 4, eps, solve_lp=not args.no_lp)
    elif which == "single-minded":
        sc = reproduce_single_minded(args.n or 4)
    elif which == "budget-additive":
        sc = reproduce_budget_additive(args.count or 500, args.seed)
    elif which == "cross-check":
        sc = reproduce_cross_check(args.count or 200, args.seed)
    elif which == "solvers":
        sc = reproduce_solvers(args.count or 100, args.seed)
    else:
        sc = reproduce_greedy(count=args.count or 100, seed=args.seed)
    results = {
        "scenario": sc.name,
        "params": sc.params,
        "passed": sc.passed,
        "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in sc.checks],
    }
    if sc.notes:
        results["notes"] = sc.notes
    return results, EXIT_OK if sc.passed else EXIT_NEGATIVE


# ---------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--approx", action="store_true",
                        help="add display-only decimal renderings of non-integer rationals")
    common.add_argument("--timing", action="store_true",
                        help="include wall-clock time (makes reports differ between runs)")
    common.add_argument("--cap", type=int, default=DEMAND_CAP,
                        help=f"largest sold set M' to enumerate (default {DEMAND_CAP})")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-o", "--output", help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="stableprice", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def market_cmd(name, fn, help_text, items=False):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("market", help="market document (JSON)")
        if items:
            p.add_argument("--items", help="sold set M': bit mask (\"11\", \"0b1011\") or index list (\"0,1,3\")")
        p.set_defaults(func=fn)
        return p

    market_cmd("gap", cmd_gap, "fractional and integral optimum on M'", items=True)
    market_cmd("stable-exists", cmd_stable_exists, "does a stable outcome sell exactly M'?", items=True)
    market_cmd("extract", cmd_extract, "stable outcome selling exactly M'", items=True)
    market_cmd("verify", cmd_verify, "check an outcome for stability").add_argument(
        "outcome", help="outcome document with allocation and prices")
    market_cmd("best-stable", cmd_best_stable, "highest-welfare stable outcome and the stability ratio")
    market_cmd("prices-for", cmd_prices_for, "cheapest prices supporting an allocation").add_argument(
        "allocation", help="allocation document")
    market_cmd("approx-ba", cmd_approx_ba, "two budget-additive buyers: 4-approximate stable outcome")
    market_cmd("greedy-sm", cmd_greedy_sm, "single-minded buyers: zero-utility prices plus greedy")

    gen = sub.add_parser("gen", parents=[common], help="generate a market document")
    gen.add_argument("variant", choices=["xos", "submodular", "single-minded", "random",
                                         "random-budget-additive", "random-explicit"])
    gen.add_argument("--m", type=int)
    gen.add_argument("--n", type=int)
    gen.add_argument("--k", type=int)
    gen.add_argument("--delta")
    gen.add_argument("--eps")
    gen.add_argument("--classes", help=f"comma-separated subset of {','.join(RANDOM_CLASSES)}")
    gen.set_defaults(func=cmd_gen)

    rep = sub.add_parser("reproduce", parents=[common], help="run a reproduction scenario")
    rep.add_argument("scenario", choices=["xos", "submodular", "single-minded", "budget-additive",
                                          "cross-check", "solvers", "greedy-sm"])
    rep.add_argument("--m", type=int)
    rep.add_argument("--n", type=int)
    rep.add_argument("--k", type=int)
    rep.add_argument("--delta")
    rep.add_argument("--eps")
    rep.add_argument("--count", type=int)
    rep.add_argument("--no-lp", action="store_true", help="skip the column-generation LP solve")
    rep.set_defaults(func=cmd_reproduce)
    return parser


def _emit(text: str, args) -> None:
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    start = time.perf_counter()
    try:
        results, code = args.func(args)
        if isinstance(results, Market):
            text = io.render_market(results)
        else:
            timing = time.perf_counter() - start if args.timing else None
            text = io.render_report(argv, results, approx=args.approx, timing=timing)
        _emit(text, args)
    except CapExceeded as exc:
        print(f"error: size cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return code


def main() -> None:
    sys.exit(run())
