from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import brute_demand
from stableprice.configlp import Allocation, fractional_opt, integral_opt, welfare
from stableprice.instances import gen_random_market, gen_single_minded_lower, gen_xos_lower
from stableprice.itemset import CapExceeded, PreconditionError, full_mask, popcount, submasks
from stableprice.stability import (
    best_stable_outcome,
    cross_validate,
    extract_stable_outcome,
    prices_for_allocation,
    prohibitive_price,
    stability_ratio,
    stable_exists_on,
    verify_stable,
)
from stableprice.valuations import Additive, Market, UnitDemand, utility

seeds = st.integers(0, 2 ** 32)


def test_empty_allocation_at_prohibitive_prices():
    market = gen_random_market(3, 3, 4)
    p = (prohibitive_price(market),) * 4
    assert verify_stable(market, Allocation.empty(4, 3), p).stable


def test_example_one_verification():
    market = gen_single_minded_lower(4)
    everything = Allocation(6, (0, 0, 0, full_mask(6)))
    report = verify_stable(market, everything, (F(1),) * 6)
    assert not report.stable
    i, S = report.witness
    assert i < 3 and S == market.buyers[i].desired
    S1 = market.buyers[0].desired
    p = tuple(F(5, 3) if S1 >> j & 1 else F(7) for j in range(6))
    assert verify_stable(market, Allocation(6, (S1, 0, 0, 0)), p).stable


def test_prices_for_allocation_examples():
    market = gen_single_minded_lower(4)
    assert prices_for_allocation(market, Allocation(6, (0, 0, 0, full_mask(6)))) is None
    S1 = market.buyers[0].desired
    p = prices_for_allocation(market, Allocation(6, (S1, 0, 0, 0)))
    assert p is not None and verify_stable(market, Allocation(6, (S1, 0, 0, 0)), p).stable
    assert prices_for_allocation(market, Allocation.empty(6, 4)) is not None


def test_prices_for_allocation_is_minimal():
    market = Market(2, (Additive((3, 1)), Additive((2, 2))))
    p = prices_for_allocation(market, Allocation(2, (0b01, 0b10)))
    # buyer 2 must not want item 0 (p0 >= 2), buyer 1 must not want item 1 (p1 >= 1)
    assert p == (2, 1)


def test_stable_exists_on_xos_instance():
    market = gen_xos_lower(5, F(1, 100))
    for S in submasks(market.items):
        assert stable_exists_on(market, S) == (popcount(S) <= 2)


def test_extract_examples():
    add = Market(3, (Additive((1, 4, 2)), Additive((3, 1, 2))))
    out = extract_stable_outcome(add)
    assert out.welfare == 3 + 4 + 2 and out.allocation.sold == 0b111
    ud = Market(3, (UnitDemand((3, 2, 1)), UnitDemand((3, 1, 0)), UnitDemand((1, 1, 1))))
    out = extract_stable_outcome(ud)
    assert verify_stable(ud, out.allocation, out.prices).stable
    # envy-free: nobody prefers another buyer's item at the posted prices
    for i, v in enumerate(ud.buyers):
        for X in out.allocation.bundles:
            assert utility(v, out.allocation.bundles[i], out.prices) >= utility(v, X, out.prices)
    out = extract_stable_outcome(add, 0)
    assert out.allocation.sold == 0 and set(out.prices) == {prohibitive_price(add)}
    with pytest.raises(PreconditionError):
        extract_stable_outcome(gen_xos_lower(5))


def test_best_stable_examples():
    x5 = gen_xos_lower(5, F(1, 100))
    assert best_stable_outcome(x5).welfare == F(149, 100)
    sm = gen_single_minded_lower(4)
    assert best_stable_outcome(sm).welfare == 5
    assert best_stable_outcome(sm, specialize=False).welfare == 5
    single = Market(3, (Additive((1, 2, 3)),))
    assert best_stable_outcome(single).welfare == 6
    assert stability_ratio(sm) == F(6, 5)
    assert stability_ratio(gen_single_minded_lower(5)) == F(10, 6)
    assert stability_ratio(Market(2, (Additive((1, 2)), Additive((2, 1))))) == 1


def test_sweep_cap():
    with pytest.raises(CapExceeded):
        best_stable_outcome(gen_random_market(0, 2, 17, ("additive",)))


@given(seeds, st.integers(1, 3), st.integers(1, 4))
def test_verify_matches_brute_force(seed, n, m):
    market = gen_random_market(seed, n, m)
    out = extract_stable_outcome(market, 0) if not stable_exists_on(market) else extract_stable_outcome(market)
    prices = tuple(x if (seed >> j) & 1 else x / 2 for j, x in enumerate(out.prices))
    report = verify_stable(market, out.allocation, prices)
    expected = all(utility(v, X, prices) == brute_demand(v, prices)[0]
                   for v, X in zip(market.buyers, out.allocation.bundles))
    assert report.stable == expected
    assert report.max_utilities == tuple(brute_demand(v, prices)[0] for v in market.buyers)


@given(seeds, st.integers(1, 3), st.integers(1, 4))
def test_stable_outcome_properties(seed, n, m):
    market = gen_random_market(seed, n, m)
    _, opt = integral_opt(market)
    for S in submasks(market.items):
        if not stable_exists_on(market, S):
            continue
        out = extract_stable_outcome(market, S)
        assert out.welfare <= opt
        assert out.welfare == fractional_opt(market, out.allocation.sold).optimal_value
        bumped = tuple(x + 5 if out.allocation.unsold >> j & 1 else x for j, x in enumerate(out.prices))
        assert verify_stable(market, out.allocation, bumped).stable


@given(seeds, st.integers(1, 2), st.integers(1, 4))
def test_zero_buyer_does_not_lower_best_stable(seed, n, m):
    market = gen_random_market(seed, n, m)
    padded = Market(m, market.buyers + (Additive((0,) * m),))
    assert best_stable_outcome(padded).welfare >= best_stable_outcome(market).welfare


@given(seeds, st.integers(1, 3), st.integers(1, 3))
def test_cross_validation(seed, n, m):
    market = gen_random_market(seed, n, m)
    assert all(c.agrees for c in cross_validate(market))


@given(seeds, st.integers(1, 3), st.integers(1, 4))
def test_single_minded_specialization_matches_sweep(seed, n, m):
    market = gen_random_market(seed, n, m, ("single_minded",))
    assert best_stable_outcome(market).welfare == best_stable_outcome(market, specialize=False).welfare
