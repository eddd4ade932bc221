"""Valuation classes, markets, and the utility/demand machinery.

A valuation is a monotone, normalized set function over ``m`` items. Sets are
integer bit masks (see :mod:`stableprice.itemset`); values are Fractions.

All valuation types are frozen dataclasses. ``v.value(S)`` evaluates one set;
``v.table`` materializes all ``2**m`` values (cached) for the exhaustive
routines.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .itemset import (
    DEMAND_CAP,
    MAX_ITEMS,
    SWEEP_CAP,
    CapExceeded,
    check_cap,
    full_mask,
    items_of,
    mask_of,
    popcount,
    within,
)
from .rational import scale_to_int


class MarketError(ValueError):
    """Malformed valuation or market description."""


def _fractions(values) -> tuple[Fraction, ...]:
    out = []
    for v in values:
        if isinstance(v, float):
            raise MarketError(f"floats are not allowed: {v!r}")
        out.append(Fraction(v))
    return tuple(out)


def _nonneg(values, what: str) -> None:
    for v in values:
        if v < 0:
            raise MarketError(f"{what} must be nonnegative, got {v}")


class Valuation:
    """Base class. Subclasses implement ``m`` and ``value``."""

    m: int

    def value(self, S: int) -> Fraction:
        raise NotImplementedError

    def _compute_table(self) -> tuple[Fraction, ...]:
        return tuple(self.value(S) for S in range(1 << self.m))

    @cached_property
    def table(self) -> tuple[Fraction, ...]:
        check_cap(self.m, DEMAND_CAP, "valuation table")
        return self._compute_table()

    @cached_property
    def int_table(self) -> tuple[tuple[int, ...], int]:
        """``(T, den)`` with ``table[S] == T[S] / den`` for every S."""
        ints, den = scale_to_int(self.table)
        return tuple(ints), den

    def _check_set(self, S: int) -> None:
        if S < 0 or not within(S, self.m):
            raise MarketError(f"set {bin(S)} outside the {self.m}-item universe")


def _sum_table(values: Sequence[Fraction]) -> list[Fraction]:
    m = len(values)
    t = [Fraction(0)] * (1 << m)
    for S in range(1, 1 << m):
        low = S & -S
        t[S] = t[S ^ low] + values[low.bit_length() - 1]
    return t


@dataclass(frozen=True)
class Additive(Valuation):
    values: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", _fractions(self.values))
        _nonneg(self.values, "additive values")

    @property
    def m(self) -> int:
        return len(self.values)

    def value(self, S: int) -> Fraction:
        self._check_set(S)
        return sum((self.values[j] for j in items_of(S)), Fraction(0))

    def _compute_table(self):
        return tuple(_sum_table(self.values))


@dataclass(frozen=True)
class UnitDemand(Valuation):
    values: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", _fractions(self.values))
        _nonneg(self.values, "unit-demand values")

    @property
    def m(self) -> int:
        return len(self.values)

    def value(self, S: int) -> Fraction:
        self._check_set(S)
        return max((self.values[j] for j in items_of(S)), default=Fraction(0))

    def _compute_table(self):
        t = [Fraction(0)] * (1 << self.m)
        for S in range(1, 1 << self.m):
            low = S & -S
            t[S] = max(t[S ^ low], self.values[low.bit_length() - 1])
        return tuple(t)


@dataclass(frozen=True)
class BudgetAdditive(Valuation):
    """``v(S) = min(sum of item values in S, budget)``."""

    values: tuple[Fraction, ...]
    budget: Fraction

    def __post_init__(self):
        object.__setattr__(self, "values", _fractions(self.values))
        object.__setattr__(self, "budget", _fractions([self.budget])[0])
        _nonneg(self.values, "budget-additive values")
        _nonneg([self.budget], "budget")

    @property
    def m(self) -> int:
        return len(self.values)

    def value(self, S: int) -> Fraction:
        self._check_set(S)
        return min(sum((self.values[j] for j in items_of(S)), Fraction(0)), self.budget)

    def _compute_table(self):
        return tuple(min(x, self.budget) for x in _sum_table(self.values))

    def capped(self) -> BudgetAdditive:
        """Same set function with every item value capped at the budget."""
        return BudgetAdditive(tuple(min(v, self.budget) for v in self.values), self.budget)


@dataclass(frozen=True)
class XOSExplicit(Valuation):
    """Pointwise maximum of additive clauses."""

    clauses: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        clauses = tuple(_fractions(c) for c in self.clauses)
        if not clauses:
            raise MarketError("XOS valuation needs at least one clause")
        if len({len(c) for c in clauses}) != 1:
            raise MarketError("XOS clauses have different lengths")
        for c in clauses:
            _nonneg(c, "XOS clause values")
        object.__setattr__(self, "clauses", clauses)

    @property
    def m(self) -> int:
        return len(self.clauses[0])

    def value(self, S: int) -> Fraction:
        self._check_set(S)
        items = items_of(S)
        return max(sum((c[j] for j in items), Fraction(0)) for c in self.clauses)

    def _compute_table(self):
        tables = [_sum_table(c) for c in self.clauses]
        return tuple(max(col) for col in zip(*tables))


@dataclass(frozen=True)
class SingleMinded(Valuation):
    """Worth ``worth`` on any superset of ``desired``, zero otherwise."""

    m: int
    desired: int
    worth: Fraction

    def __post_init__(self):
        object.__setattr__(self, "worth", _fractions([self.worth])[0])
        _nonneg([self.worth], "single-minded value")
        if not 0 <= self.m <= MAX_ITEMS:
            raise MarketError(f"item count {self.m} outside [0, {MAX_ITEMS}]")
        if self.desired <= 0 or not within(self.desired, self.m):
            raise MarketError("desired set must be a nonempty subset of the items")

    def value(self, S: int) -> Fraction:
        self._check_set(S)
        return self.worth if S & self.desired == self.desired else Fraction(0)

    def _compute_table(self):
        d, v, zero = self.desired, self.worth, Fraction(0)
        return tuple(v if S & d == d else zero for S in range(1 << self.m))


@dataclass(frozen=True)
class SymmetricTable(Valuation):
    """Value depends only on cardinality: ``v(S) = by_size[|S|]``."""

    by_size: tuple[Fraction, ...]

    def __post_init__(self):
        vals = _fractions(self.by_size)
        if not vals:
            raise MarketError("symmetric table needs an entry for size 0")
        if vals[0] != 0:
            raise MarketError("symmetric table must have value 0 at size 0")
        _nonneg(vals, "symmetric table values")
        object.__setattr__(self, "by_size", vals)

    @property
    def m(self) -> int:
        return len(self.by_size) - 1

    def value(self, S: int) -> Fraction:
        self._check_set(S)
        return self.by_size[popcount(S)]

    def _compute_table(self):
        return tuple(self.by_size[bin(S).count("1")] for S in range(1 << self.m))


def h_value(z: int) -> Fraction:
    """``h(z) = z + H_z`` where ``H_z`` is the z-th harmonic number."""
    if z < 0:
        raise ValueError("h is defined on nonnegative integers")
    return z + sum((Fraction(1, i) for i in range(1, z + 1)), Fraction(0))


@dataclass(frozen=True)
class HPlusEpsilonF(Valuation):
    """``v(S) = h(|S|) + eps * inner(S)``."""

    eps: Fraction
    inner: Valuation

    def __post_init__(self):
        object.__setattr__(self, "eps", _fractions([self.eps])[0])
        _nonneg([self.eps], "eps")
        if not isinstance(self.inner, Valuation):
            raise MarketError("inner must be a valuation")

    @property
    def m(self) -> int:
        return self.inner.m

    def value(self, S: int) -> Fraction:
        return h_value(popcount(S)) + self.eps * self.inner.value(S)

    def _compute_table(self):
        hs = [h_value(z) for z in range(self.m + 1)]
        eps = self.eps
        return tuple(hs[bin(S).count("1")] + eps * f for S, f in enumerate(self.inner.table))


def _check_buckets(buckets, equal_size: bool) -> tuple[tuple[int, ...], ...]:
    buckets = tuple(tuple(sorted(int(j) for j in b)) for b in buckets)
    if not buckets or any(not b for b in buckets):
        raise MarketError("buckets must be nonempty")
    seen = [j for b in buckets for j in b]
    m = len(seen)
    if sorted(seen) != list(range(m)):
        raise MarketError("buckets do not partition the items 0..m-1")
    if m > MAX_ITEMS:
        raise CapExceeded(f"{m} items exceeds the hard cap {MAX_ITEMS}")
    if equal_size and len({len(b) for b in buckets}) != 1:
        raise MarketError("buckets have unequal sizes")
    return buckets


def xos_bucket(size: int) -> int:
    """The per-bucket function of f1: 0, 2, then |T| for |T| >= 2."""
    if size == 0:
        return 0
    if size == 1:
        return 2
    return size


@dataclass(frozen=True)
class BucketXOS(Valuation):
    """``f1(S) = max_j XOS(S & B_j)`` with XOS(T) = |T| (|T|>1), 2 (|T|=1), 0 (T empty)."""

    buckets: tuple[tuple[int, ...], ...]
    equal_size: bool = True

    def __post_init__(self):
        object.__setattr__(self, "buckets", _check_buckets(self.buckets, self.equal_size))

    @property
    def m(self) -> int:
        return sum(len(b) for b in self.buckets)

    @cached_property
    def bucket_masks(self) -> tuple[int, ...]:
        return tuple(mask_of(b) for b in self.buckets)

    def value(self, S: int) -> Fraction:
        self._check_set(S)
        return Fraction(max(xos_bucket(popcount(S & B)) for B in self.bucket_masks))


@dataclass(frozen=True)
class BucketUnit(Valuation):
    """``f2(S) = sum_j Unit(S & B_j)`` with Unit(T) = 1 - 1/k for nonempty T.

    ``k`` defaults to the number of buckets.
    """

    buckets: tuple[tuple[int, ...], ...]
    k: int | None = None
    equal_size: bool = True

    def __post_init__(self):
        object.__setattr__(self, "buckets", _check_buckets(self.buckets, self.equal_size))
        if self.k is None:
            object.__setattr__(self, "k", len(self.buckets))
        if self.k < 1:
            raise MarketError("k must be positive")

    @property
    def m(self) -> int:
        return sum(len(b) for b in self.buckets)

    @cached_property
    def bucket_masks(self) -> tuple[int, ...]:
        return tuple(mask_of(b) for b in self.buckets)

    def value(self, S: int) -> Fraction:
        self._check_set(S)
        hit = sum(1 for B in self.bucket_masks if S & B)
        return hit * (1 - Fraction(1, self.k))


@dataclass(frozen=True)
class ExplicitTable(Valuation):
    """One value per subset, indexed by bit mask. Must be normalized and monotone."""

    values: tuple[Fraction, ...]

    def __post_init__(self):
        vals = _fractions(self.values)
        size = len(vals)
        if size == 0 or size & (size - 1):
            raise MarketError("explicit table length must be a power of two")
        m = size.bit_length() - 1
        check_cap(m, DEMAND_CAP, "explicit table")
        if vals[0] != 0:
            raise MarketError("explicit table must have v(empty) = 0")
        for S in range(1, size):
            for j in items_of(S):
                if vals[S ^ (1 << j)] > vals[S]:
                    raise MarketError(f"explicit table is not monotone at {bin(S)}")
        object.__setattr__(self, "values", vals)

    @property
    def m(self) -> int:
        return len(self.values).bit_length() - 1

    def value(self, S: int) -> Fraction:
        self._check_set(S)
        return self.values[S]

    def _compute_table(self):
        return self.values


@dataclass(frozen=True)
class Market:
    m: int
    buyers: tuple[Valuation, ...]

    def __post_init__(self):
        object.__setattr__(self, "buyers", tuple(self.buyers))
        if self.m < 0:
            raise MarketError("negative item count")
        if self.m > MAX_ITEMS:
            raise CapExceeded(f"{self.m} items exceeds the hard cap {MAX_ITEMS}")
        if not self.buyers:
            raise MarketError("a market needs at least one buyer")
        for i, v in enumerate(self.buyers):
            if not isinstance(v, Valuation):
                raise MarketError(f"buyer {i} is not a valuation")
            if v.m != self.m:
                raise MarketError(f"buyer {i} is defined on {v.m} items, market has {self.m}")

    @property
    def n(self) -> int:
        return len(self.buyers)

    @property
    def items(self) -> int:
        return full_mask(self.m)


# ---------------------------------------------------------------------------
# utility and demand

def value(v: Valuation, S: int) -> Fraction:
    return v.value(S)


def marginal(v: Valuation, j: int, S: int) -> Fraction:
    if S >> j & 1:
        raise ValueError(f"item {j} already in the set")
    return v.value(S | 1 << j) - v.value(S)


def price_of(p: Sequence[Fraction], S: int) -> Fraction:
    return sum((p[j] for j in items_of(S)), Fraction(0))


def utility(v: Valuation, S: int, p: Sequence[Fraction]) -> Fraction:
    if len(p) != v.m:
        raise ValueError(f"price vector has length {len(p)}, expected {v.m}")
    return v.value(S) - price_of(p, S)


@dataclass(frozen=True)
class Demand:
    max_utility: Fraction
    sets: tuple[int, ...]


def demand(v: Valuation, p: Sequence[Fraction], within_mask: int | None = None,
           cap: int = DEMAND_CAP) -> Demand:
    """Exhaustive demand correspondence at prices ``p``.

    With ``within_mask`` the maximization runs over its subsets only.
    Demanded sets come back in ascending bit order.
    """
    m = v.m
    if len(p) != m:
        raise ValueError(f"price vector has length {len(p)}, expected {m}")
    universe = full_mask(m) if within_mask is None else within_mask
    check_cap(popcount(universe), cap, "demand enumeration")
    T, vden = v.int_table
    P, pden = scale_to_int(list(p))
    # utility scaled by vden * pden; sweep subsets of universe in ascending order
    items = items_of(universe)
    subsets = [0]
    cost = [0]
    for j in items:
        bit, pj = 1 << j, P[j] * vden
        subsets += [s | bit for s in subsets]
        cost += [c + pj for c in cost]
    best = None
    argmax: list[int] = []
    for S, c in zip(subsets, cost):
        u = T[S] * pden - c
        if best is None or u > best:
            best, argmax = u, [S]
        elif u == best:
            argmax.append(S)
    return Demand(Fraction(best, vden * pden), tuple(argmax))


def max_utility(v: Valuation, p: Sequence[Fraction]) -> tuple[Fraction, int]:
    """Maximum utility and the first (lowest-mask) demanded set.

    Closed forms for additive, unit-demand and single-minded buyers; exhaustive
    enumeration otherwise. Both agree with :func:`demand`.
    """
    zero = Fraction(0)
    if isinstance(v, Additive):
        S = mask_of(j for j in range(v.m) if v.values[j] > p[j])
        return sum((v.values[j] - p[j] for j in items_of(S)), zero), S
    if isinstance(v, UnitDemand):
        best, S = zero, 0
        for j in range(v.m):
            if v.values[j] - p[j] > best:
                best, S = v.values[j] - p[j], 1 << j
        return best, S
    if isinstance(v, SingleMinded):
        u = v.worth - price_of(p, v.desired)
        return (u, v.desired) if u > 0 else (zero, 0)
    d = demand(v, p)
    return d.max_utility, d.sets[0]


# ---------------------------------------------------------------------------
# structural checks

@dataclass(frozen=True)
class SetFunctionCheck:
    """Outcome of an exhaustive property check; falsy when a witness exists.

    For submodularity the witness is ``(S, i, j)`` with
    ``v(S+i+j) - v(S+j) > v(S+i) - v(S)``; for monotonicity it is ``(S, j)``
    with ``v(S+j) < v(S)``.
    """

    holds: bool
    witness: tuple[int, ...] | None = None

    def __bool__(self) -> bool:
        return self.holds


def is_monotone(v: Valuation, cap: int = SWEEP_CAP) -> SetFunctionCheck:
    check_cap(v.m, cap, "monotonicity sweep")
    T, _ = v.int_table
    if T[0] != 0:
        return SetFunctionCheck(False, (0,))
    for S in range(1 << v.m):
        for j in range(v.m):
            bit = 1 << j
            if not S & bit and T[S | bit] < T[S]:
                return SetFunctionCheck(False, (S, j))
    return SetFunctionCheck(True)


def is_submodular(v: Valuation, cap: int = SWEEP_CAP) -> SetFunctionCheck:
    """Exhaustive check of ``v(S+i+j) - v(S+j) <= v(S+i) - v(S)`` for i < j outside S."""
    m = v.m
    check_cap(m, cap, "submodularity sweep")
    T, _ = v.int_table
    full = full_mask(m)
    for S in range(1 << m):
        out = items_of(full & ~S)
        base = T[S]
        for a, i in enumerate(out):
            Si = S | 1 << i
            gain_i = T[Si] - base
            for j in out[a + 1:]:
                bit = 1 << j
                if T[Si | bit] - T[S | bit] > gain_i:
                    return SetFunctionCheck(False, (S, i, j))
    return SetFunctionCheck(True)


def max_value(v: Valuation) -> Fraction:
    """``max_S v(S)``; exhaustive enumeration except for the bucket functions,
    whose maximum is attained on the full item set (they are monotone)."""
    if isinstance(v, (BucketXOS, BucketUnit)):
        return v.value(full_mask(v.m))
    return max(v.table)


def epsilon_bound(f: Valuation) -> Fraction | float:
    """Perturbation bound below which ``h(|S|) + eps * f(S)`` is submodular.

    Returns ``1 / (2 (m+1) (m+2) max_S f(S))`` with m the number of items, or
    ``math.inf`` when f is identically zero.
    """
    top = max_value(f)
    if top <= 0:
        return math.inf
    m = f.m
    return 1 / (2 * (m + 1) * (m + 2) * top)
