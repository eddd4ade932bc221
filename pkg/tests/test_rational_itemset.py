from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stableprice.itemset import CapExceeded, check_cap, full_mask, items_of, mask_of, popcount, submasks
from stableprice.rational import common_denominator, parse_rational, render_rational, scale_to_int


@pytest.mark.parametrize("text,expected", [
    ("3/4", Fraction(3, 4)), ("6/8", Fraction(3, 4)), ("-2", Fraction(-2)), (" 5 / 10 ", Fraction(1, 2)), (7, Fraction(7)),
])
def test_parse_rational(text, expected):
    assert parse_rational(text) == expected


@pytest.mark.parametrize("bad", ["3/0", "0.5", "1e3", "a/b", "", 0.5, True, None])
def test_parse_rational_rejects(bad):
    with pytest.raises(ValueError):
        parse_rational(bad)


def test_render_drops_unit_denominator():
    assert render_rational(Fraction(4, 2)) == "2"
    assert render_rational(Fraction(-3, 6)) == "-1/2"


@given(st.fractions())
def test_render_parse_round_trip(q):
    assert parse_rational(render_rational(q)) == q


@given(st.lists(st.fractions(min_value=-100, max_value=100, max_denominator=50), min_size=1, max_size=8))
def test_scale_to_int(values):
    ints, den = scale_to_int(values)
    assert den == common_denominator(values)
    assert [Fraction(x, den) for x in ints] == values


@given(st.sets(st.integers(0, 40)))
def test_mask_round_trip(items):
    mask = mask_of(items)
    assert items_of(mask) == sorted(items)
    assert popcount(mask) == len(items)


@given(st.integers(0, (1 << 10) - 1))
def test_submasks_are_all_subsets_in_order(mask):
    subs = submasks(mask)
    assert subs == sorted(S for S in range(mask + 1) if S & ~mask == 0)
    assert len(subs) == 1 << popcount(mask)


def test_caps():
    assert full_mask(3) == 0b111
    check_cap(20, 20)
    with pytest.raises(CapExceeded):
        check_cap(21, 20)
    with pytest.raises(ValueError):
        mask_of([-1])
