"""
Submodular buyers: selling all sixteen items is never stable
============================================================

Both buyers value a bundle by a shared concave function of its size plus a
tiny bucket-dependent perturbation. The explicit fractional solution below
does slightly better than the best integral allocation of the sixteen items,
so the LP restricted to them has a gap and no stable outcome sells them all.
"""
from stableprice import bucket_certificate, gen_submodular_lower, integral_opt, is_submodular
from stableprice.itemset import items_of

market = gen_submodular_lower(4)
eps = market.buyers[0].eps
print("eps =", eps)
print("buyer valuations submodular:", [bool(is_submodular(v)) for v in market.buyers])

cert = bucket_certificate(market, market.items)
print("fullest bucket:", items_of(cert.S1), " t =", cert.t)
print("reference allocation:", cert.x.as_lists())
print("fractional solution uses", len(cert.y), "bundles; feasible:", cert.feasible)
print("gain over the reference, in units of eps:", cert.f_gain, ">= bound", cert.bound)

_, opt = integral_opt(market)
print("integral optimum equals the reference:", opt == cert.sw_x)
print("fractional minus integral:", cert.sw_y - opt)
