"""
Two budget-additive buyers
==========================

Prices come from one buyer's values (when its budget binds) or from the lower
of the two values per item (when it does not). The outcome is always stable
and within a factor 4 of the optimum.
"""
import random

from stableprice import BudgetAdditive, Market, budget_additive_approx, gen_random_market, integral_opt

market = Market(2, (BudgetAdditive((4, 1), 10), BudgetAdditive((2, 3), 5)))
res = budget_additive_approx(market)
print("case", res.case, "prices", [str(p) for p in res.prices], "bundles", res.allocation.as_lists(),
      "welfare", res.welfare)

rng = random.Random(1)
worst = None
for _ in range(200):
    market = gen_random_market(rng.getrandbits(64), 2, rng.randint(1, 6), ("budget_additive",))
    res = budget_additive_approx(market)
    _, opt = integral_opt(market)
    if res.welfare and (worst is None or opt / res.welfare > worst):
        worst = opt / res.welfare
print("worst OPT / SW over 200 random markets:", worst)
