"""Constructive procedures: two-buyer budget-additive pricing, greedy pricing for
single-minded buyers, and explicit fractional certificates for the two
lower-bound constructions.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .configlp import Allocation, lp_feasible, lp_objective, welfare
from .itemset import PreconditionError, full_mask, items_of, mask_of, popcount
from .simplex import OPTIMAL, maximize
from .stability import Outcome, verify_stable
from .valuations import (
    BucketUnit,
    BucketXOS,
    BudgetAdditive,
    HPlusEpsilonF,
    Market,
    SingleMinded,
    SymmetricTable,
    UnitDemand,
    demand,
    price_of,
)


# ---------------------------------------------------------------------------
# two budget-additive buyers

@dataclass(frozen=True)
class BudgetAdditiveResult:
    case: int
    allocation: Allocation
    prices: tuple[Fraction, ...]
    welfare: Fraction
    #: B1 + B2 in case 1, B2 + sum_j v1j in case 2
    opt_upper: Fraction
    #: buyer 2's bundle and buyer 1's reference set, in the relabeled order
    d2: int
    s1: int
    #: True when the input's second buyer has the larger budget
    swapped: bool
    #: relabeled budgets and buyer 1's capped total value
    b1: Fraction
    b2: Fraction
    v1_total: Fraction


def _case1_set(values: list[Fraction], budget: Fraction) -> int:
    half = budget / 2
    for j, v in enumerate(values):
        if v >= half:
            return 1 << j
    S, total = 0, Fraction(0)
    for j, v in enumerate(values):
        S |= 1 << j
        total += v
        if total >= half:
            break
    return S


def budget_additive_approx(market: Market) -> BudgetAdditiveResult:
    """Stable outcome within a factor 4 of optimal for two budget-additive buyers.

    Buyers are relabeled so that buyer 1 has the larger budget and item values
    are capped at the budgets. If buyer 1's total value reaches its budget,
    items are priced at buyer 1's values; otherwise each item is priced at the
    lower of the two values and buyer 2 picks a demanded bundle among the items
    it values strictly more.
    """
    if market.n != 2 or not all(isinstance(v, BudgetAdditive) for v in market.buyers):
        raise PreconditionError("needs exactly two budget-additive buyers")
    capped = [v.capped() for v in market.buyers]
    swapped = capped[1].budget > capped[0].budget
    first, second = (capped[1], capped[0]) if swapped else (capped[0], capped[1])
    m = market.m
    v1, B1 = list(first.values), first.budget
    v2, B2 = list(second.values), second.budget
    full = full_mask(m)

    if sum(v1) >= B1:
        case = 1
        prices = tuple(v1)
        s1 = _case1_set(v1, B1)
        d2 = demand(second, prices).sets[0]
        bundle1, bundle2 = s1 & ~d2, d2
        opt_upper = B1 + B2
    else:
        case = 2
        s1 = mask_of(j for j in range(m) if v1[j] >= v2[j])
        s2 = full & ~s1
        prices = tuple(v2[j] if s1 >> j & 1 else v1[j] for j in range(m))
        restricted = demand(second, prices, within_mask=s2)
        if restricted.max_utility != demand(second, prices).max_utility:
            raise RuntimeError("no demanded bundle of buyer 2 lies inside its preferred items")
        d2 = restricted.sets[0]
        bundle1, bundle2 = s1 | (s2 & ~d2), d2
        opt_upper = B2 + sum(v1, Fraction(0))

    bundles = (bundle2, bundle1) if swapped else (bundle1, bundle2)
    alloc = Allocation(m, bundles)
    report = verify_stable(market, alloc, prices)
    if not report.stable:
        raise RuntimeError(f"budget-additive outcome failed verification at {report.witness}")
    return BudgetAdditiveResult(case, alloc, prices, welfare(market, alloc), opt_upper, d2, s1,
                                swapped, B1, B2, sum(v1, Fraction(0)))


# ---------------------------------------------------------------------------
# single-minded buyers

def zero_utility_prices(market: Market) -> tuple[Fraction, ...]:
    """Minimum-total prices with ``p(S_i*) >= v_i`` for every single-minded buyer."""
    buyers = market.buyers
    columns = [[(j, 1) for j in items_of(v.desired)] for v in buyers]
    res = maximize([v.worth for v in buyers], columns, [Fraction(1)] * market.m)
    if res.status != OPTIMAL:
        raise RuntimeError("covering LP dual reported unbounded")
    return res.y


def single_minded_greedy_stable(market: Market) -> Outcome:
    """Price so nobody has positive utility, then allocate greedily among tight buyers.

    Tight buyers (desired set priced exactly at value) are served in decreasing
    ``v_i / sqrt(|S_i*|)`` order, ties by index, skipping any whose desired set
    overlaps an earlier winner.
    """
    if not all(isinstance(v, SingleMinded) for v in market.buyers):
        raise PreconditionError("every buyer must be single-minded")
    prices = zero_utility_prices(market)
    tight = [i for i, v in enumerate(market.buyers)
             if v.worth > 0 and price_of(prices, v.desired) == v.worth]
    # v / sqrt(s) ordered exactly through v^2 / s
    tight.sort(key=lambda i: (-market.buyers[i].worth ** 2 / popcount(market.buyers[i].desired), i))
    bundles = [0] * market.n
    used = 0
    for i in tight:
        S = market.buyers[i].desired
        if not S & used:
            bundles[i] = S
            used |= S
    alloc = Allocation(market.m, tuple(bundles))
    report = verify_stable(market, alloc, prices)
    if not report.stable:
        raise RuntimeError(f"greedy single-minded outcome failed verification at {report.witness}")
    return Outcome(alloc, prices, welfare(market, alloc))


# ---------------------------------------------------------------------------
# fractional certificates

@dataclass(frozen=True)
class BucketCertificate:
    K: int
    k: int
    t: int
    eps: Fraction
    S1: int
    S2: int
    J1: int
    J2: int
    T: int
    pi: dict[int, int]
    y: dict[tuple[int, int], Fraction]
    x: Allocation
    sw_y: Fraction
    sw_x: Fraction
    feasible: bool

    @property
    def improvement(self) -> Fraction:
        return self.sw_y - self.sw_x

    @property
    def f_gain(self) -> Fraction | None:
        """Improvement in units of the perturbation (the f-terms alone)."""
        return None if self.eps == 0 else self.improvement / self.eps

    @property
    def bound(self) -> Fraction:
        return 1 - Fraction(1, self.k) - Fraction(self.t - 2, self.t - 1)


def _bucket_instance(market: Market) -> tuple[tuple[int, ...], Fraction, int]:
    if market.n != 2:
        raise PreconditionError("needs the two-buyer bucket instance")
    b1, b2 = market.buyers
    if not (isinstance(b1, HPlusEpsilonF) and isinstance(b1.inner, BucketXOS)
            and isinstance(b2, HPlusEpsilonF) and isinstance(b2.inner, BucketUnit)):
        raise PreconditionError("buyers must be h + eps*f1 (bucket XOS) and h + eps*f2 (bucket unit)")
    if b1.eps != b2.eps or b1.inner.buckets != b2.inner.buckets:
        raise PreconditionError("both buyers must share eps and the bucket partition")
    k = len(b1.inner.buckets)
    if b2.inner.k != k:
        raise PreconditionError("unit-demand part must use k = number of buckets")
    return b1.inner.bucket_masks, b1.eps, k


def bucket_certificate(market: Market, K: int) -> BucketCertificate:
    """Fractional solution on the sold set K beating the reference integral allocation.

    Needs ``|K| >= 4k`` and at least 4 sold items in the fullest bucket.
    """
    buckets, eps, k = _bucket_instance(market)
    if K & ~market.items:
        raise PreconditionError("K lies outside the market")
    if popcount(K) < 4 * k:
        raise PreconditionError(f"|K| = {popcount(K)} < 4k = {4 * k}")
    counts = [popcount(K & B) for B in buckets]
    t = max(counts)
    top = counts.index(t)
    if t < 4:
        raise PreconditionError("the fullest sold bucket has fewer than 4 items")
    S1 = K & buckets[top]
    S2 = 0
    for b, B in enumerate(buckets):
        if b != top and K & B:
            S2 |= (K & B) & -(K & B)
    rest = items_of(K & ~S1 & ~S2)
    size2 = -(-popcount(K) // 2) - popcount(S2)
    J2 = mask_of(rest[:size2])
    J1 = mask_of(rest[size2:])
    if popcount(J2) <= k:
        raise RuntimeError("|J2| <= k; the split is inconsistent with |K| >= 4k")
    T_items = items_of(J2)[:t]
    T = mask_of(T_items)
    pi = dict(zip(items_of(S1), T_items))

    y: dict[tuple[int, int], Fraction] = {}

    def add(i: int, S: int, w: Fraction) -> None:
        y[(i, S)] = y.get((i, S), Fraction(0)) + w

    add(0, S1 | J1, Fraction(t - 2, t - 1))
    for j, pj in pi.items():
        add(0, (1 << j) | J1 | (T & ~(1 << pj)), Fraction(1, t * (t - 1)))
        add(1, (1 << j) | S2 | (J2 & ~(1 << pj)), Fraction(1, t))
    x = Allocation(market.m, (S1 | J1, S2 | J2))
    return BucketCertificate(
        K=K, k=k, t=t, eps=eps, S1=S1, S2=S2, J1=J1, J2=J2, T=T, pi=pi, y=y, x=x,
        sw_y=lp_objective(market, y), sw_x=welfare(market, x), feasible=lp_feasible(market, y, K),
    )


@dataclass(frozen=True)
class XOSCertificate:
    m: int
    delta: Fraction
    y: dict[tuple[int, int], Fraction]
    sw_y: Fraction
    feasible: bool

    @property
    def expected(self) -> Fraction:
        m = self.m
        return Fraction(m, 2) + Fraction(1, 2 * (m - 1)) - self.delta


def xos_fractional_certificate(market: Market, delta: Fraction | None = None) -> XOSCertificate:
    """Fractional solution of the unit-demand vs. max(1, |S|/2) instance worth more than m/2."""
    if market.n != 2:
        raise PreconditionError("needs the two-buyer XOS instance")
    unit, sym = market.buyers
    m = market.m
    if not isinstance(unit, UnitDemand) or len(set(unit.values)) != 1:
        raise PreconditionError("buyer 1 must be unit-demand with identical item values")
    expected_table = (Fraction(0),) + tuple(max(Fraction(1), Fraction(z, 2)) for z in range(1, m + 1))
    if not isinstance(sym, SymmetricTable) or sym.by_size != expected_table:
        raise PreconditionError("buyer 2 must value a set of size z at max(1, z/2)")
    implied = Fraction(1, 2) - unit.values[0]
    if delta is not None and Fraction(delta) != implied:
        raise PreconditionError(f"delta {delta} disagrees with the market's {implied}")
    delta = implied
    if m <= 2:
        raise PreconditionError("the certificate needs m > 2")
    if not 0 < delta < Fraction(1, 2 * (m - 1)):
        raise PreconditionError("delta must lie strictly inside (0, 1/(2(m-1)))")
    y: dict[tuple[int, int], Fraction] = {}
    for j in range(m):
        y[(0, 1 << j)] = Fraction(1, m)
        y[(1, 1 << j)] = Fraction(1, m * (m - 1))
    y[(1, full_mask(m))] = Fraction(m - 2, m - 1)
    cert = XOSCertificate(m, delta, y, lp_objective(market, y), lp_feasible(market, y))
    if cert.sw_y != cert.expected:
        raise RuntimeError(f"certificate value {cert.sw_y} differs from {cert.expected}")
    return cert
