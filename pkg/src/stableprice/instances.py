"""Market generators: the lower-bound constructions and seeded random markets."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .itemset import DEMAND_CAP, MAX_ITEMS, PreconditionError, check_cap, full_mask, mask_of
from .valuations import (
    Additive,
    BucketUnit,
    BucketXOS,
    BudgetAdditive,
    ExplicitTable,
    HPlusEpsilonF,
    Market,
    SingleMinded,
    SymmetricTable,
    UnitDemand,
    Valuation,
    XOSExplicit,
    epsilon_bound,
)

RANDOM_CLASSES = (
    "additive",
    "unit_demand",
    "budget_additive",
    "xos",
    "single_minded",
    "symmetric",
    "explicit",
)


def default_xos_delta(m: int) -> Fraction:
    return Fraction(1, 4 * (m - 1))


def gen_xos_lower(m: int, delta: Fraction | None = None) -> Market:
    """Unit-demand buyer worth 1/2 - delta on any item vs. a buyer worth max(1, |S|/2)."""
    if m < 2:
        raise PreconditionError("the XOS instance needs m >= 2")
    delta = default_xos_delta(m) if delta is None else Fraction(delta)
    if not 0 < delta < Fraction(1, 2 * (m - 1)):
        raise PreconditionError(f"delta must lie in (0, 1/(2(m-1))) = (0, {Fraction(1, 2 * (m - 1))})")
    unit = UnitDemand((Fraction(1, 2) - delta,) * m)
    sym = SymmetricTable((Fraction(0),) + tuple(max(Fraction(1), Fraction(z, 2)) for z in range(1, m + 1)))
    return Market(m, (unit, sym))


def consecutive_buckets(k: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(range(b * k, (b + 1) * k)) for b in range(k))


def shared_epsilon_bound(k: int) -> Fraction:
    buckets = consecutive_buckets(k)
    return min(epsilon_bound(BucketXOS(buckets)), epsilon_bound(BucketUnit(buckets)))


def gen_submodular_lower(k: int, eps: Fraction | None = None) -> Market:
    """Two submodular buyers on k*k items in k buckets: h + eps*f1 and h + eps*f2."""
    if k < 2:
        raise PreconditionError("the bucket construction needs k >= 2")
    m = k * k
    if m > MAX_ITEMS:
        raise PreconditionError(f"k={k} gives {m} items, above the {MAX_ITEMS}-item cap")
    bound = shared_epsilon_bound(k)
    if eps is None:
        eps = bound / 2
    else:
        eps = Fraction(eps)
        if not 0 <= eps < bound:
            raise PreconditionError(f"eps must lie in [0, {bound})")
    buckets = consecutive_buckets(k)
    return Market(m, (HPlusEpsilonF(eps, BucketXOS(buckets)), HPlusEpsilonF(eps, BucketUnit(buckets))))


def single_minded_items(n: int) -> list[tuple[int, int]]:
    """Items (a, b) with a, b >= 1 and a + b <= n, in lexicographic order."""
    return [(a, b) for a in range(1, n) for b in range(1, n - a + 1)]


def gen_single_minded_lower(n: int) -> Market:
    """n-1 buyers on crossing 'lines' of the triangular grid plus one buyer wanting everything."""
    if n < 3:
        raise PreconditionError("the single-minded instance needs n >= 3")
    items = single_minded_items(n)
    m = len(items)
    if m > MAX_ITEMS:
        raise PreconditionError(f"n={n} gives {m} items, above the {MAX_ITEMS}-item cap")
    index = {ab: idx for idx, ab in enumerate(items)}
    buyers: list[Valuation] = []
    for i in range(1, n):
        desired = mask_of(index[(a, b)] for (a, b) in items if a == i or b == n - i)
        buyers.append(SingleMinded(m, desired, Fraction(n + 1)))
    buyers.append(SingleMinded(m, full_mask(m), Fraction(m)))
    return Market(m, tuple(buyers))


def _rand_value(rng: random.Random, high: int) -> Fraction:
    den = rng.choice((1, 2, 3, 4))
    return Fraction(rng.randint(0, high * den), den)


def _random_valuation(rng: random.Random, kind: str, m: int, high: int) -> Valuation:
    if kind == "additive":
        return Additive(tuple(_rand_value(rng, high) for _ in range(m)))
    if kind == "unit_demand":
        return UnitDemand(tuple(_rand_value(rng, high) for _ in range(m)))
    if kind == "budget_additive":
        vals = tuple(_rand_value(rng, high) for _ in range(m))
        # budgets up to twice the total value, so both the binding and the slack regime occur
        budget = Fraction(rng.randint(0, 8 * max(1, math.ceil(sum(vals)))), 4)
        return BudgetAdditive(vals, budget).capped()
    if kind == "xos":
        clauses = tuple(tuple(_rand_value(rng, high) for _ in range(m)) for _ in range(rng.randint(1, 3)))
        return XOSExplicit(clauses)
    if kind == "single_minded":
        desired = 0
        while desired == 0:
            desired = rng.getrandbits(m)
        return SingleMinded(m, desired, _rand_value(rng, high * max(1, bin(desired).count("1"))))
    if kind == "symmetric":
        vals = [Fraction(0)]
        for _ in range(m):
            vals.append(vals[-1] + _rand_value(rng, high))
        return SymmetricTable(tuple(vals))
    if kind == "explicit":
        check_cap(m, DEMAND_CAP, "explicit table generation")
        raw = [Fraction(0)] + [_rand_value(rng, high * m) for _ in range((1 << m) - 1)]
        # cumulative max over subsets makes the table monotone
        for S in range(1, 1 << m):
            low = S
            while low:
                bit = low & -low
                if raw[S ^ bit] > raw[S]:
                    raw[S] = raw[S ^ bit]
                low ^= bit
        return ExplicitTable(tuple(raw))
    raise ValueError(f"unknown valuation class {kind!r}; choose from {RANDOM_CLASSES}")


def gen_random_market(seed: int, n: int, m: int, classes: Sequence[str] = RANDOM_CLASSES,
                      high: int = 10) -> Market:
    """Seeded random market; buyer ``i`` draws its class uniformly from ``classes``."""
    if n < 1 or m < 1:
        raise PreconditionError("need at least one buyer and one item")
    if m > MAX_ITEMS:
        raise PreconditionError(f"{m} items is above the {MAX_ITEMS}-item cap")
    rng = random.Random(seed)
    buyers = tuple(_random_valuation(rng, rng.choice(list(classes)), m, high) for _ in range(n))
    return Market(m, buyers)


@dataclass(frozen=True)
class GeneratorParams:
    """One generator call, as named on the command line."""

    variant: str
    k: int | None = None
    m: int | None = None
    n: int | None = None
    delta: Fraction | None = None
    eps: Fraction | None = None
    seed: int = 0
    classes: tuple[str, ...] = RANDOM_CLASSES

    def build(self) -> Market:
        if self.variant == "xos":
            return gen_xos_lower(self.m if self.m is not None else 5, self.delta)
        if self.variant == "submodular":
            return gen_submodular_lower(self.k if self.k is not None else 2, self.eps)
        if self.variant == "single_minded":
            return gen_single_minded_lower(self.n if self.n is not None else 4)
        if self.variant == "random_budget_additive":
            return gen_random_market(self.seed, self.n or 2, self.m or 4, ("budget_additive",))
        if self.variant == "random_explicit":
            return gen_random_market(self.seed, self.n or 2, self.m or 4, ("explicit",))
        if self.variant == "random":
            return gen_random_market(self.seed, self.n or 2, self.m or 4, self.classes)
        raise ValueError(f"unknown generator variant {self.variant!r}")
