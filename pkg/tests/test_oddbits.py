import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from goldbach import OddBitset, ParameterError, ResourceError


def test_new_filled_small():
    bs = OddBitset.new_filled(3, 9)
    assert [bs.test(v) for v in (3, 5, 7, 9)] == [True] * 4
    assert bs.popcount() == 4
    assert len(bs) == 4


def test_singleton():
    bs = OddBitset.new_filled(5, 5)
    assert bs.test(5) and bs.popcount() == 1


@pytest.mark.parametrize("lo,hi", [(4, 9), (3, 8), (9, 3)])
def test_new_filled_rejects_bad_bounds(lo, hi):
    with pytest.raises(ParameterError):
        OddBitset.new_filled(lo, hi)


def test_allocation_cap():
    with pytest.raises(ResourceError):
        OddBitset.new_filled(1, 2001, max_bits=1000)


def test_clear_then_test():
    bs = OddBitset.new_filled(3, 9)
    bs.clear(9)
    assert not bs.test(9)
    assert bs.test(7)
    assert bs.popcount() == 3


@pytest.mark.parametrize("v", [11, 1, 4])
def test_out_of_range_or_even(v):
    bs = OddBitset.new_filled(3, 9)
    with pytest.raises(ParameterError):
        bs.clear(v)
    with pytest.raises(ParameterError):
        bs.test(v)


def test_clear_all():
    bs = OddBitset.new_filled(1, 257)
    for v in range(1, 258, 2):
        bs.clear(v)
    assert bs.popcount() == 0


def test_slack_bits_are_zero():
    bs = OddBitset.new_filled(1, 2 * 70 - 1)  # 70 bits -> 2 words
    assert int(bs.words[-1]) == (1 << 6) - 1


def test_top_of_u64_range():
    bs = OddBitset.new_filled(2**64 - 129, 2**64 - 1)
    bs.clear(2**64 - 1)
    assert not bs.test(2**64 - 1)
    assert bs.test(2**64 - 3)
    assert int(bs.values()[-1]) == 2**64 - 3


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**12).map(lambda x: 2 * x + 1), st.integers(0, 10**6 // 2),
       st.data())
def test_matches_bool_reference(lo, half_span, data):
    hi = lo + 2 * half_span
    bs = OddBitset.new_filled(lo, hi)
    ref = np.ones(half_span + 1, dtype=bool)
    k = data.draw(st.integers(0, min(200, half_span + 1)))
    idx = data.draw(st.lists(st.integers(0, half_span), min_size=k, max_size=k))
    for i in idx:
        bs.clear(lo + 2 * i)
        ref[i] = False
    assert bs.popcount() == ref.sum()
    np.testing.assert_array_equal(bs.to_bool(), ref)
    for i in idx[:20]:
        assert not bs.test(lo + 2 * i)
