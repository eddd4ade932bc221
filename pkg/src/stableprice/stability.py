"""Stable outcomes: verification, existence, price extraction, and the best stable welfare.

An outcome (allocation X, prices p) is stable when every buyer's bundle X_i
maximizes v_i(S) - p(S) over all bundles S of the whole item set. A stable
outcome selling exactly M' exists iff the configuration LP restricted to M'
has integrality gap 1; :func:`prices_for_allocation` re-derives the same
verdict from the stability inequalities alone and serves as the independent
check.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .configlp import (
    Allocation,
    LPSolution,
    disjoint_families,
    fractional_opt,
    integral_opt,
    integral_opt_all,
    welfare,
)
from .itemset import SWEEP_CAP, CapExceeded, PreconditionError, check_cap, items_of, submasks
from .simplex import UNBOUNDED, maximize
from .valuations import Market, SingleMinded, max_utility, price_of, utility

#: columns allowed in the stability price LP (buyers x compared bundles)
PRICE_LP_BUDGET = 1 << 18


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    #: first (buyer, bundle) whose utility beats the buyer's assigned bundle
    witness: tuple[int, int] | None
    max_utilities: tuple[Fraction, ...]


class Outcome(NamedTuple):
    allocation: Allocation
    prices: tuple[Fraction, ...]
    welfare: Fraction


def check_prices(market: Market, p: Sequence[Fraction]) -> tuple[Fraction, ...]:
    p = tuple(Fraction(x) for x in p)
    if len(p) != market.m:
        raise ValueError(f"price vector has length {len(p)}, expected {market.m}")
    if any(x < 0 for x in p):
        raise ValueError("prices must be nonnegative")
    return p


def prohibitive_price(market: Market) -> Fraction:
    """A price at which no buyer demands any bundle containing the item."""
    full = market.items
    return 1 + max(v.value(full) for v in market.buyers)


def verify_stable(market: Market, allocation: Allocation, prices: Sequence[Fraction]) -> StabilityReport:
    p = check_prices(market, prices)
    if allocation.m != market.m or len(allocation.bundles) != market.n:
        raise ValueError("allocation does not match the market")
    witness = None
    tops = []
    for i, (v, X) in enumerate(zip(market.buyers, allocation.bundles)):
        top, best_set = max_utility(v, p)
        tops.append(top)
        if witness is None and utility(v, X, p) < top:
            witness = (i, best_set)
    return StabilityReport(witness is None, witness, tuple(tops))


def stable_exists_on(market: Market, items: int | None = None) -> bool:
    items = market.items if items is None else items
    frac = fractional_opt(market, items).optimal_value
    _, integral = integral_opt(market, items)
    return frac == integral


def _outcome_from_lp(market: Market, items: int, lp: LPSolution) -> Outcome:
    alloc, val = integral_opt(market, items)
    if val != lp.optimal_value:
        raise PreconditionError("integrality gap exceeds 1: no stable outcome sells exactly these items")
    prices = tuple(lp.prices(market.m, fill=prohibitive_price(market)))
    report = verify_stable(market, alloc, prices)
    if not report.stable:
        raise RuntimeError(f"extracted outcome failed verification at {report.witness}")
    return Outcome(alloc, prices, val)


def extract_stable_outcome(market: Market, items: int | None = None) -> Outcome:
    """Stable outcome selling exactly ``items``: integral optimum plus LP dual prices.

    Items outside ``items`` get the prohibitive price.
    """
    items = market.items if items is None else items
    return _outcome_from_lp(market, items, fractional_opt(market, items))


# ---------------------------------------------------------------------------
# prices from the stability inequalities

def _comparison_sets(v, m: int) -> list[int]:
    if isinstance(v, SingleMinded):
        # every other bundle is dominated by the empty set or the desired set
        return [0, v.desired]
    check_cap(m, SWEEP_CAP, "stability price LP")
    return list(range(1 << m))


def _min_price_lp(m: int, rows: list[tuple[int, int, Fraction]]) -> tuple[Fraction, ...] | None:
    """Minimize sum(p) over p >= 0 with ``p(plus) - p(minus) <= rhs`` per row.

    Solved through its dual, whose slack basis is feasible: the dual is
    unbounded exactly when no price vector satisfies the rows.
    """
    columns = []
    costs = []
    for plus, minus, rhs in rows:
        col = [(j, -1) for j in items_of(plus)] + [(j, 1) for j in items_of(minus)]
        col.sort()
        columns.append(col)
        costs.append(-rhs)
    res = maximize(costs, columns, [Fraction(1)] * m)
    if res.status == UNBOUNDED:
        return None
    return tuple(res.y)


def _stability_rows(market: Market, allocation: Allocation) -> list[tuple[int, int, Fraction]]:
    rows = []
    for v, X in zip(market.buyers, allocation.bundles):
        vX = v.value(X)
        for S in _comparison_sets(v, market.m):
            if S == X:
                continue
            rows.append((X & ~S, S & ~X, vX - v.value(S)))
    return rows


def prices_for_allocation(market: Market, allocation: Allocation) -> tuple[Fraction, ...] | None:
    """Cheapest (minimum total) prices supporting ``allocation``, or None if none exist.

    Stability is linear in p: v_i(X_i) - p(X_i) >= v_i(S) - p(S) for every
    buyer i and bundle S.
    """
    if allocation.m != market.m or len(allocation.bundles) != market.n:
        raise ValueError("allocation does not match the market")
    size = sum(2 if isinstance(v, SingleMinded) else 1 << market.m for v in market.buyers)
    if size > PRICE_LP_BUDGET:
        raise CapExceeded(f"stability price LP needs {size} columns")
    p = _min_price_lp(market.m, _stability_rows(market, allocation))
    if p is not None:
        report = verify_stable(market, allocation, p)
        if not report.stable:
            raise RuntimeError(f"price LP solution failed verification at {report.witness}")
    return p


# ---------------------------------------------------------------------------
# best stable outcome

def _best_stable_single_minded(market: Market) -> Outcome:
    buyers = market.buyers
    desired = [v.desired for v in buyers]
    families = disjoint_families(desired)
    worth = {F: sum((buyers[i].worth for i in items_of(F)), Fraction(0)) for F in families}
    families.sort(key=lambda F: (-worth[F], F))
    for F in families:
        rows = []
        for i, v in enumerate(buyers):
            if F >> i & 1:
                rows.append((v.desired, 0, v.worth))
            else:
                rows.append((0, v.desired, -v.worth))
        p = _min_price_lp(market.m, rows)
        if p is None:
            continue
        alloc = Allocation(market.m, tuple(desired[i] if F >> i & 1 else 0 for i in range(market.n)))
        report = verify_stable(market, alloc, p)
        if not report.stable:
            raise RuntimeError(f"single-minded outcome failed verification at {report.witness}")
        return Outcome(alloc, p, worth[F])
    raise RuntimeError("no stable family found; the empty family is always stable")


def best_stable_outcome(market: Market, specialize: bool = True) -> Outcome:
    """Stable outcome of maximum welfare over every possible sold set.

    Sold sets are tried in decreasing order of their integral optimum (ties by
    mask); the first with integrality gap 1 wins. All-single-minded markets use
    the disjoint-family search instead when ``specialize`` is set.
    """
    if specialize and all(isinstance(v, SingleMinded) for v in market.buyers):
        return _best_stable_single_minded(market)
    check_cap(market.m, SWEEP_CAP, "stable-outcome sweep")
    opt = integral_opt_all(market)
    for S in sorted(opt, key=lambda S: (-opt[S], S)):
        lp = fractional_opt(market, S)
        if lp.optimal_value == opt[S]:
            return _outcome_from_lp(market, S, lp)
    raise RuntimeError("no sold set with gap 1; the empty set always qualifies")


def stability_ratio(market: Market) -> Fraction | float:
    """OPT divided by the best stable welfare (``math.inf`` if only the latter is 0)."""
    _, opt = integral_opt(market)
    best = best_stable_outcome(market).welfare
    if best == 0:
        return Fraction(1) if opt == 0 else math.inf
    return opt / best


# ---------------------------------------------------------------------------
# cross-validation of the LP characterization

@dataclass(frozen=True)
class CrossCheck:
    items: int
    gap_one: bool
    fractional: Fraction
    optimal_allocations: int
    supported: int

    @property
    def agrees(self) -> bool:
        if self.gap_one:
            return self.optimal_allocations > 0 and self.supported == self.optimal_allocations
        return self.supported == 0


def _allocations_selling(n: int, m: int, items: int):
    item_list = items_of(items)
    for owners in itertools.product(range(n), repeat=len(item_list)):
        bundles = [0] * n
        for j, i in zip(item_list, owners):
            bundles[i] |= 1 << j
        yield Allocation(m, tuple(bundles))


def cross_validate(market: Market, items: int | None = None) -> list[CrossCheck]:
    """Compare the gap-1 verdict with supporting prices, for every sold set.

    For each subset M' of ``items``, every allocation selling exactly M' whose
    welfare equals the fractional optimum is handed to
    :func:`prices_for_allocation`. With gap 1 all of them must be supported;
    otherwise none can reach the fractional optimum at all.
    """
    items = market.items if items is None else items
    out = []
    for S in submasks(items):
        lp = fractional_opt(market, S)
        _, integral = integral_opt(market, S)
        gap_one = lp.optimal_value == integral
        total = supported = 0
        for alloc in _allocations_selling(market.n, market.m, S):
            if welfare(market, alloc) != lp.optimal_value:
                continue
            total += 1
            if prices_for_allocation(market, alloc) is not None:
                supported += 1
        out.append(CrossCheck(S, gap_one, lp.optimal_value, total, supported))
    return out
