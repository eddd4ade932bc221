"""
Single-minded buyers on a triangular grid
=========================================

Items are pairs (a, b) with a + b <= n. Buyer i wants the "row" a = i together
with the "column" b = n - i; the last buyer wants everything. Welfare m needs
the last buyer, but stability caps welfare at n + 1.
"""
from stableprice import (
    Allocation,
    best_stable_outcome,
    gen_single_minded_lower,
    integral_opt,
    prices_for_allocation,
    single_minded_greedy_stable,
)
from stableprice.instances import single_minded_items
from stableprice.itemset import items_of

for n in (4, 5, 6):
    market = gen_single_minded_lower(n)
    grid = single_minded_items(n)
    print(f"n = {n}: {market.m} items")
    for i, v in enumerate(market.buyers[:-1]):
        print(f"  buyer {i + 1} wants {[grid[j] for j in items_of(v.desired)]} for {v.worth}")

    alloc, opt = integral_opt(market)
    print("  optimum:", opt, "(all items to the last buyer)")
    print("  prices supporting it:", prices_for_allocation(market, alloc))

    best = best_stable_outcome(market)
    greedy = single_minded_greedy_stable(market)
    print("  best stable welfare:", best.welfare, " greedy:", greedy.welfare, " ratio:", opt / best.welfare)

# an allocation that is stable: one row-and-column buyer, everything else priced out
market = gen_single_minded_lower(4)
S1 = market.buyers[0].desired
print("prices for S1* alone:", [str(p) for p in prices_for_allocation(market, Allocation(6, (S1, 0, 0, 0)))])
