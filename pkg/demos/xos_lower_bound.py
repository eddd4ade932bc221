"""
Two buyers, five items, no stable outcome sells more than two
==============================================================

One unit-demand buyer values any single item at 1/2 - delta. The other
values a bundle of z items at max(1, z/2). Giving everything to the second
buyer is optimal, yet no prices support it.
"""
from fractions import Fraction

from stableprice import best_stable_outcome, fractional_opt, gen_xos_lower, integral_opt, stable_exists_on
from stableprice.algorithms import xos_fractional_certificate
from stableprice.itemset import popcount, submasks

market = gen_xos_lower(5, Fraction(1, 100))

alloc, opt = integral_opt(market)
print("optimal welfare:", opt, "bundles:", alloc.as_lists())

# a fractional solution beats every integral one, so the LP has a gap
cert = xos_fractional_certificate(market)
print("fractional certificate:", cert.sw_y, "feasible:", cert.feasible)
print("LP optimum:", fractional_opt(market).optimal_value)

# which sold sets admit a stable outcome?
for size in range(6):
    verdicts = {stable_exists_on(market, S) for S in submasks(market.items) if popcount(S) == size}
    print(f"  |M'| = {size}: stable outcome exists -> {verdicts}")

best = best_stable_outcome(market)
print("best stable welfare:", best.welfare, "at prices", [str(p) for p in best.prices])
print("ratio:", opt / best.welfare)
