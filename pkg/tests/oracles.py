"""Slow, obviously-correct reference computations used only by the tests."""
from __future__ import annotations

import itertools
from fractions import Fraction

from stableprice.itemset import items_of


def brute_demand(v, p):
    """All 2^m bundles scored directly from ``v.value`` (no tables, no scaling)."""
    scores = {S: v.value(S) - sum((p[j] for j in items_of(S)), Fraction(0)) for S in range(1 << v.m)}
    top = max(scores.values())
    return top, [S for S, u in scores.items() if u == top]


def brute_integral(market, items=None):
    """Best welfare over every assignment of each item of ``items`` to a buyer or to nobody."""
    items = market.items if items is None else items
    ilist = items_of(items)
    best = Fraction(0)
    for owners in itertools.product(range(market.n + 1), repeat=len(ilist)):
        bundles = [0] * market.n
        for j, i in zip(ilist, owners):
            if i < market.n:
                bundles[i] |= 1 << j
        best = max(best, sum((v.value(X) for v, X in zip(market.buyers, bundles)), Fraction(0)))
    return best


def certify_config_lp(market, sol, items=None):
    """Check an LPSolution is optimal: primal feasible, dual feasible on every bundle, equal objectives."""
    items = market.items if items is None else items
    buyer_load = [Fraction(0)] * market.n
    item_load = {j: Fraction(0) for j in items_of(items)}
    primal = Fraction(0)
    for (i, S), x in sol.primal.items():
        assert x >= 0 and not S & ~items
        buyer_load[i] += x
        for j in items_of(S):
            item_load[j] += x
        primal += x * market.buyers[i].value(S)
    assert all(b <= 1 for b in buyer_load) and all(b <= 1 for b in item_load.values())
    assert primal == sol.optimal_value
    u, p = sol.dual_buyer, sol.dual_item
    assert all(x >= 0 for x in u) and all(x >= 0 for x in p.values())
    sub = items
    while True:
        for i, v in enumerate(market.buyers):
            assert u[i] + sum((p[j] for j in items_of(sub)), Fraction(0)) >= v.value(sub)
        if sub == 0:
            break
        sub = (sub - 1) & items
    assert sum(u, Fraction(0)) + sum(p.values(), Fraction(0)) == sol.optimal_value
