from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stableprice.instances import (
    GeneratorParams,
    gen_random_market,
    gen_single_minded_lower,
    gen_submodular_lower,
    gen_xos_lower,
    single_minded_items,
)
from stableprice.io import render_market
from stableprice.itemset import PreconditionError, items_of, popcount
from stableprice.valuations import BudgetAdditive, ExplicitTable, h_value, is_monotone, is_submodular


def test_xos_instance():
    market = gen_xos_lower(5, F(1, 100))
    assert market.buyers[1].by_size == (0, 1, 1, F(3, 2), 2, F(5, 2))
    assert set(market.buyers[0].values) == {F(49, 100)}
    assert gen_xos_lower(5) == gen_xos_lower(5, F(1, 16))
    for bad in (F(0), F(1, 8), F(1)):
        with pytest.raises(PreconditionError):
            gen_xos_lower(5, bad)


def test_submodular_instance():
    market = gen_submodular_lower(2)
    assert market.m == 4 and market.buyers[0].eps == F(1, 240)
    k4 = gen_submodular_lower(4)
    assert k4.buyers[0].value(k4.items) == h_value(16) + k4.buyers[0].eps * 4
    with pytest.raises(PreconditionError):
        gen_submodular_lower(1)
    with pytest.raises(PreconditionError):
        gen_submodular_lower(2, F(1, 120))


@pytest.mark.parametrize("k", [2, 3])
def test_submodular_instance_passes_checks(k):
    for v in gen_submodular_lower(k).buyers:
        assert is_monotone(v) and is_submodular(v)


@pytest.mark.parametrize("n", [3, 4, 5, 6, 8])
def test_single_minded_instance(n):
    market = gen_single_minded_lower(n)
    m = n * (n - 1) // 2
    assert market.m == m and single_minded_items(n) == sorted(single_minded_items(n))
    sets = [v.desired for v in market.buyers[:-1]]
    assert all(popcount(S) == n - 1 for S in sets)
    assert all(popcount(a & b) == 1 for i, a in enumerate(sets) for b in sets[i + 1:])
    cover = [sum(1 for S in sets if S >> j & 1) for j in range(m)]
    assert max(cover) <= 2
    assert sum(popcount(S) for S in sets) == (n - 1) ** 2 <= 2 * m
    assert market.buyers[-1].worth == m
    with pytest.raises(PreconditionError):
        gen_single_minded_lower(2)


@given(st.integers(0, 2 ** 64 - 1), st.integers(1, 3), st.integers(1, 5))
def test_random_markets_are_deterministic_and_valid(seed, n, m):
    a = gen_random_market(seed, n, m)
    assert render_market(a) == render_market(gen_random_market(seed, n, m))
    for v in a.buyers:
        assert v.value(0) == 0 and is_monotone(v)
        if isinstance(v, BudgetAdditive):
            assert all(x <= v.budget for x in v.values)
        if isinstance(v, ExplicitTable):
            assert v.values[0] == 0


def test_generator_params():
    assert GeneratorParams("single_minded", n=4).build() == gen_single_minded_lower(4)
    assert GeneratorParams("random_explicit", seed=3).build() == gen_random_market(3, 2, 4, ("explicit",))
    with pytest.raises(ValueError):
        GeneratorParams("nope").build()
    with pytest.raises(ValueError):
        gen_random_market(0, 1, 2, ("cubist",))
