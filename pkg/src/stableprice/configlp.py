"""The configuration LP, its exact solution, and the integral optimum.

The LP has one variable ``x[i, S]`` per buyer ``i`` and bundle ``S`` of the
restricted item set, one packing row per buyer (``sum_S x[i, S] <= 1``) and one
per item (``sum_{i, S ∋ j} x[i, S] <= 1``). Row duals are the buyer utilities
``u_i`` and the item prices ``p_j``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .itemset import (
    DEMAND_CAP,
    CapExceeded,
    check_cap,
    items_of,
    mask_of,
    popcount,
    submasks,
    within,
)
from .rational import common_denominator
from .simplex import OPTIMAL, maximize
from .valuations import Market, SingleMinded, demand

#: largest restricted item set for which all columns are enumerated
COLUMN_CAP = 14
#: elementary steps allowed in the integral-optimum dynamic program
INTEGRAL_BUDGET = 20_000_000


@dataclass(frozen=True)
class Allocation:
    """Disjoint bundles, one per buyer; ``unsold`` is the remainder X_0."""

    m: int
    bundles: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "bundles", tuple(self.bundles))
        seen = 0
        for i, X in enumerate(self.bundles):
            if X < 0 or not within(X, self.m):
                raise ValueError(f"bundle of buyer {i} lies outside the {self.m} items")
            if X & seen:
                raise ValueError(f"bundle of buyer {i} overlaps an earlier bundle")
            seen |= X

    @classmethod
    def from_lists(cls, m: int, bundles: Iterable[Iterable[int]]) -> Allocation:
        return cls(m, tuple(mask_of(b) for b in bundles))

    @classmethod
    def empty(cls, m: int, n: int) -> Allocation:
        return cls(m, (0,) * n)

    @property
    def sold(self) -> int:
        out = 0
        for X in self.bundles:
            out |= X
        return out

    @property
    def unsold(self) -> int:
        return ((1 << self.m) - 1) & ~self.sold

    def as_lists(self) -> list[list[int]]:
        return [items_of(X) for X in self.bundles]


def welfare(market: Market, allocation: Allocation) -> Fraction:
    if len(allocation.bundles) != market.n:
        raise ValueError("allocation and market disagree on the number of buyers")
    return sum((v.value(X) for v, X in zip(market.buyers, allocation.bundles)), Fraction(0))


@dataclass(frozen=True)
class ConfigLP:
    market: Market
    items: int
    #: (buyer, bundle, value) in buyer-major, ascending-bundle order
    columns: tuple[tuple[int, int, Fraction], ...]


@dataclass(frozen=True)
class LPSolution:
    optimal_value: Fraction
    primal: dict[tuple[int, int], Fraction]
    dual_buyer: tuple[Fraction, ...]
    dual_item: dict[int, Fraction]
    status: str = OPTIMAL
    n_columns: int = 0
    rounds: int = field(default=0, compare=False)

    def prices(self, m: int, fill: Fraction = Fraction(0)) -> list[Fraction]:
        """Full-length price vector: LP duals on the restricted items, ``fill`` elsewhere."""
        return [self.dual_item.get(j, fill) for j in range(m)]


def _resolve_items(market: Market, items: int | None) -> int:
    if items is None:
        return market.items
    if items < 0 or not within(items, market.m):
        raise ValueError("restricted item set lies outside the market")
    return items


def _dominated(table: Sequence[Fraction], S: int) -> bool:
    # monotone v: S is dominated iff dropping some single item keeps the value
    vS = table[S]
    if vS == 0:
        return True
    low = S
    while low:
        bit = low & -low
        if table[S ^ bit] == vS:
            return True
        low ^= bit
    return False


def build_config_lp(market: Market, items: int | None = None, cap: int = COLUMN_CAP,
                    prune: bool = False) -> ConfigLP:
    """Enumerate every (buyer, nonempty bundle of ``items``) column.

    With ``prune`` columns that are zero-valued or tie a one-smaller sub-bundle
    are dropped; for monotone valuations their dual constraints are implied by
    the kept ones, so optimum and duals are unaffected. A single-minded buyer
    keeps only its desired set.
    """
    items = _resolve_items(market, items)
    check_cap(popcount(items), cap, "configuration LP column build")
    subs = submasks(items)[1:]
    columns = []
    for i, v in enumerate(market.buyers):
        table = v.table
        for S in subs:
            if prune and _dominated(table, S):
                continue
            columns.append((i, S, table[S]))
    return ConfigLP(market, items, tuple(columns))


def _solve_columns(market: Market, items: int,
                   columns: Sequence[tuple[int, int, Fraction]]) -> LPSolution:
    n = market.n
    item_list = items_of(items)
    row_of = {j: n + r for r, j in enumerate(item_list)}
    sparse = [[(i, 1)] + [(row_of[j], 1) for j in items_of(S)] for i, S, _ in columns]
    res = maximize([val for _, _, val in columns], sparse, [Fraction(1)] * (n + len(item_list)))
    if res.status != OPTIMAL:
        raise RuntimeError("configuration LP reported unbounded; the model is malformed")
    primal = {}
    for k, xv in sorted(res.x.items()):
        i, S, _ = columns[k]
        primal[(i, S)] = xv
    return LPSolution(
        optimal_value=res.value,
        primal=primal,
        dual_buyer=tuple(res.y[:n]),
        dual_item={j: res.y[row_of[j]] for j in item_list},
        n_columns=len(columns),
    )


def solve_exact(lp: ConfigLP) -> LPSolution:
    return _solve_columns(lp.market, lp.items, lp.columns)


def solve_column_generation(market: Market, items: int | None = None,
                            cap: int = DEMAND_CAP) -> LPSolution:
    """Configuration LP by delayed column generation.

    The pricing step is the demand oracle: a buyer whose best utility over
    bundles of ``items`` at the current item duals exceeds its dual ``u_i``
    contributes its canonical demanded bundle as a new column.
    """
    items = _resolve_items(market, items)
    check_cap(popcount(items), cap, "column-generation demand oracle")
    cols: dict[tuple[int, int], Fraction] = {}
    if items:
        for i, v in enumerate(market.buyers):
            for j in items_of(items):
                cols.setdefault((i, 1 << j), v.value(1 << j))
            cols.setdefault((i, items), v.value(items))
    rounds = 0
    while True:
        rounds += 1
        sol = _solve_columns(market, items, [(i, S, val) for (i, S), val in cols.items()])
        prices = sol.prices(market.m)
        added = False
        for i, v in enumerate(market.buyers):
            d = demand(v, prices, within_mask=items, cap=cap)
            if d.max_utility > sol.dual_buyer[i]:
                S = d.sets[0]
                if (i, S) in cols:
                    raise RuntimeError("pricing returned an existing column; LP solve is inconsistent")
                cols[(i, S)] = v.value(S)
                added = True
        if not added:
            return LPSolution(sol.optimal_value, sol.primal, sol.dual_buyer, sol.dual_item,
                              n_columns=len(cols), rounds=rounds)


def fractional_opt(market: Market, items: int | None = None) -> LPSolution:
    """Exact configuration-LP optimum; full column build when small, column generation otherwise."""
    items = _resolve_items(market, items)
    if popcount(items) <= COLUMN_CAP:
        return solve_exact(build_config_lp(market, items, prune=True))
    return solve_column_generation(market, items)


# ---------------------------------------------------------------------------
# integral optimum

def _scaled_tables(market: Market, subs: list[int]) -> tuple[list[list[int]], int]:
    tables = [v.table for v in market.buyers]
    den = common_denominator(x for t in tables for x in (t[S] for S in subs))
    return [[t[S].numerator * (den // t[S].denominator) for S in subs] for t in tables], den


def _integral_dp(market: Market, items: int, all_subsets: bool, budget: int):
    n = market.n
    k = popcount(items)
    sweeps = (n - 1) if all_subsets else max(n - 2, 0)
    work = sweeps * 3 ** k + (0 if all_subsets else 2 ** k)
    if work > budget:
        raise CapExceeded(f"integral optimum over {k} items and {n} buyers needs ~{work} steps")
    check_cap(market.m, DEMAND_CAP, "valuation table")
    subs = submasks(items)
    V, den = _scaled_tables(market, subs)
    full = len(subs) - 1
    # best[S]: optimum for buyers 0..i on compressed subset S. Buyer 0 takes all
    # of S (monotone valuations), so leftovers are never needed.
    best = V[0]
    choices: list[list[int] | None] = [None]
    last = n - 1
    for i in range(1, n):
        Vi = V[i]
        targets = range(full + 1) if (all_subsets or i < last) else (full,)
        nb = [0] * (full + 1) if (all_subsets or i < last) else None
        ch = [0] * (full + 1)
        for S in targets:
            top, arg = -1, 0
            T = S
            while True:
                val = best[S ^ T] + Vi[T]
                if val >= top:
                    top, arg = val, T
                if T == 0:
                    break
                T = (T - 1) & S
            ch[S] = arg
            if nb is not None:
                nb[S] = top
            else:
                final = top
        choices.append(ch)
        if nb is not None:
            best = nb
    if n == 1 or all_subsets:
        final = best[full]
    # reconstruct canonical allocation for the whole restricted set
    bundles = [0] * n
    S = full
    for i in range(n - 1, 0, -1):
        T = choices[i][S]
        bundles[i] = T
        S ^= T
    bundles[0] = S
    real = [subs[c] for c in bundles]
    alloc = Allocation(market.m, tuple(real))
    return alloc, Fraction(final, den), (best if all_subsets else None), subs, den


def disjoint_families(desired: Sequence[int], budget: int = INTEGRAL_BUDGET) -> list[int]:
    """Buyer sets (as masks) whose desired bundles are pairwise disjoint, in DFS order."""
    n = len(desired)
    out: list[int] = []

    def grow(start: int, family: int, used: int) -> None:
        if len(out) >= budget:
            raise CapExceeded(f"more than {budget} disjoint families of desired sets")
        out.append(family)
        for i in range(start, n):
            if not desired[i] & used:
                grow(i + 1, family | 1 << i, used | desired[i])

    grow(0, 0, 0)
    return out


def _integral_single_minded(market: Market, items: int, budget: int) -> tuple[Allocation, Fraction]:
    buyers = market.buyers
    # buyers whose desired set leaves ``items`` can only receive worthless bundles
    eligible = [i for i, v in enumerate(buyers) if not v.desired & ~items]
    best, best_val = 0, Fraction(0)
    for fam in disjoint_families([buyers[i].desired for i in eligible], budget):
        val = sum((buyers[eligible[r]].worth for r in items_of(fam)), Fraction(0))
        if val > best_val:
            best, best_val = fam, val
    bundles = [0] * market.n
    for r in items_of(best):
        bundles[eligible[r]] = buyers[eligible[r]].desired
    bundles[0] |= items & ~mask_of(j for X in bundles for j in items_of(X))
    return Allocation(market.m, tuple(bundles)), best_val


def integral_opt(market: Market, items: int | None = None,
                 budget: int = INTEGRAL_BUDGET) -> tuple[Allocation, Fraction]:
    """Welfare-maximizing integral allocation of ``items``.

    Exact dynamic program over buyers; every item of ``items`` ends up
    allocated (giving a leftover to buyer 0 never hurts a monotone valuation).
    Among optimal allocations the later buyer takes the lowest-mask bundle.
    All-single-minded markets instead take the best family of buyers with
    pairwise disjoint desired sets (first in search order among ties).
    """
    items = _resolve_items(market, items)
    if all(isinstance(v, SingleMinded) for v in market.buyers):
        return _integral_single_minded(market, items, budget)
    alloc, val, *_ = _integral_dp(market, items, False, budget)
    return alloc, val


def integral_opt_all(market: Market, items: int | None = None,
                     budget: int = INTEGRAL_BUDGET) -> dict[int, Fraction]:
    """Integral optimum of every subset of ``items`` (keyed by mask)."""
    items = _resolve_items(market, items)
    _, _, best, subs, den = _integral_dp(market, items, True, budget)
    return {S: Fraction(best[c], den) for c, S in enumerate(subs)}


def integrality_gap(market: Market, items: int | None = None) -> Fraction:
    """Fractional over integral optimum; 1 when both vanish."""
    items = _resolve_items(market, items)
    frac = fractional_opt(market, items).optimal_value
    _, integral = integral_opt(market, items)
    if integral == 0:
        if frac != 0:
            raise RuntimeError("fractional optimum positive while integral optimum is zero")
        return Fraction(1)
    return frac / integral


# ---------------------------------------------------------------------------
# explicit fractional solutions

def lp_objective(market: Market, y: dict[tuple[int, int], Fraction]) -> Fraction:
    return sum((w * market.buyers[i].value(S) for (i, S), w in y.items()), Fraction(0))


def lp_feasible(market: Market, y: dict[tuple[int, int], Fraction], items: int | None = None) -> bool:
    """Exact check of the configuration-LP constraints for a sparse solution ``y``."""
    items = _resolve_items(market, items)
    buyer_load = [Fraction(0)] * market.n
    item_load = [Fraction(0)] * market.m
    for (i, S), w in y.items():
        if not 0 <= i < market.n or w < 0 or w > 1 or S & ~items:
            return False
        buyer_load[i] += w
        for j in items_of(S):
            item_load[j] += w
    return all(x <= 1 for x in buyer_load) and all(x <= 1 for x in item_load)
