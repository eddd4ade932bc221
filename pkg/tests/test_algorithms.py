from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stableprice.algorithms import (
    budget_additive_approx,
    bucket_certificate,
    single_minded_greedy_stable,
    xos_fractional_certificate,
    zero_utility_prices,
)
from stableprice.configlp import integral_opt, lp_feasible
from stableprice.instances import gen_random_market, gen_single_minded_lower, gen_submodular_lower, gen_xos_lower
from stableprice.itemset import PreconditionError, full_mask, items_of, mask_of, popcount
from stableprice.stability import verify_stable
from stableprice.valuations import Additive, BudgetAdditive, Market, SingleMinded, demand, max_utility, price_of

seeds = st.integers(0, 2 ** 32)


def test_budget_additive_case_one():
    market = Market(2, (BudgetAdditive((3, 3), 4), BudgetAdditive((1, 1), 4)))
    res = budget_additive_approx(market)
    assert res.case == 1 and res.prices == (3, 3)
    assert res.s1 == 0b01 and res.d2 == 0
    assert res.allocation.bundles == (0b01, 0) and res.welfare == 3
    assert 4 * res.welfare >= integral_opt(market)[1] == 4


def test_budget_additive_case_two():
    market = Market(2, (BudgetAdditive((4, 1), 10), BudgetAdditive((2, 3), 5)))
    res = budget_additive_approx(market)
    assert res.case == 2 and res.s1 == 0b01 and res.prices == (2, 1)
    assert res.d2 == 0b10 and res.allocation.bundles == (0b01, 0b10)
    assert res.welfare == 7 == integral_opt(market)[1]


def test_budget_additive_relabels_buyers():
    market = Market(2, (BudgetAdditive((2, 3), 5), BudgetAdditive((4, 1), 10)))
    res = budget_additive_approx(market)
    assert res.swapped and res.allocation.bundles == (0b10, 0b01)


def test_budget_additive_all_zero():
    market = Market(2, (BudgetAdditive((0, 0), 3), BudgetAdditive((0, 0), 1)))
    res = budget_additive_approx(market)
    assert res.welfare == 0 and verify_stable(market, res.allocation, res.prices).stable


def test_budget_additive_preconditions():
    with pytest.raises(PreconditionError):
        budget_additive_approx(Market(1, (BudgetAdditive((1,), 1),)))
    with pytest.raises(PreconditionError):
        budget_additive_approx(Market(1, (BudgetAdditive((1,), 1), Additive((1,)))))


@given(seeds, st.integers(1, 6))
def test_budget_additive_guarantees(seed, m):
    market = gen_random_market(seed, 2, m, ("budget_additive",))
    res = budget_additive_approx(market)
    _, opt = integral_opt(market)
    assert verify_stable(market, res.allocation, res.prices).stable
    assert 4 * res.welfare >= opt and opt <= res.opt_upper
    if res.case == 1:
        assert res.b1 / 2 <= price_of(res.prices, res.s1) <= res.b1
        assert res.welfare >= res.b1 / 2
    else:
        second = market.buyers[0 if res.swapped else 1]
        assert res.welfare >= second.value(full_mask(m) & ~res.s1)
        assert res.welfare >= res.v1_total
        assert res.d2 in demand(second, res.prices).sets


def test_greedy_examples():
    sm = gen_single_minded_lower(4)
    out = single_minded_greedy_stable(sm)
    assert out.welfare >= 5
    one = Market(3, (SingleMinded(3, 0b111, 1),))
    out = single_minded_greedy_stable(one)
    assert out.welfare == 1 and sum(out.prices) == 1 and out.allocation.bundles == (0b111,)
    two = Market(4, (SingleMinded(4, 0b0011, 3), SingleMinded(4, 0b1100, 5)))
    out = single_minded_greedy_stable(two)
    assert out.welfare == 8
    with pytest.raises(PreconditionError):
        single_minded_greedy_stable(Market(1, (Additive((1,)),)))


@given(seeds, st.integers(1, 8), st.integers(1, 12))
def test_greedy_zero_utility(seed, n, m):
    market = gen_random_market(seed, n, m, ("single_minded",))
    p = zero_utility_prices(market)
    assert all(price_of(p, v.desired) >= v.worth for v in market.buyers)
    out = single_minded_greedy_stable(market)
    assert verify_stable(market, out.allocation, out.prices).stable
    assert all(max_utility(v, out.prices)[0] == 0 for v in market.buyers)


def test_xos_certificate():
    market = gen_xos_lower(5, F(1, 100))
    cert = xos_fractional_certificate(market, F(1, 100))
    assert cert.feasible and cert.sw_y == F(523, 200) == cert.expected
    assert lp_feasible(market, cert.y)
    with pytest.raises(PreconditionError):
        xos_fractional_certificate(market, F(1, 50))
    with pytest.raises(PreconditionError):
        xos_fractional_certificate(gen_xos_lower(2, F(1, 10)))


def test_bucket_certificate_k4():
    market = gen_submodular_lower(4)
    cert = bucket_certificate(market, market.items)
    assert cert.feasible and cert.t == 4
    assert cert.bound == F(1, 12) and cert.f_gain >= cert.bound
    assert popcount(cert.S2 | cert.J2) == 8 and popcount(cert.J2) > cert.k
    assert cert.S1 | cert.J1 | cert.S2 | cert.J2 == market.items
    assert sorted(cert.pi) == items_of(cert.S1) and sorted(cert.pi.values()) == items_of(cert.T)
    _, opt = integral_opt(market)
    assert cert.sw_x == opt < cert.sw_y


def test_bucket_certificate_on_partial_sold_set():
    market = gen_submodular_lower(5)
    K = mask_of(j for j in range(25) if j not in (5, 10, 15, 20, 24))
    cert = bucket_certificate(market, K)
    assert cert.feasible and cert.t == 5
    assert cert.improvement > 0 and cert.f_gain >= cert.bound


def test_bucket_certificate_preconditions():
    market = gen_submodular_lower(4)
    with pytest.raises(PreconditionError):
        bucket_certificate(market, mask_of(range(15)))
    with pytest.raises(PreconditionError):
        bucket_certificate(gen_submodular_lower(2), 0b1111)
    with pytest.raises(PreconditionError):
        bucket_certificate(gen_xos_lower(5), 0b11111)
