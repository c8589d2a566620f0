"""Sector enumeration and indexing."""
from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st

import entroscope as es


def test_dimensions_match_binomials():
    for n, k in [(2, 1), (4, 2), (6, 3), (10, 5), (12, 4)]:
        assert es.enumerate_sector(n, k).dim == comb(n, k)


def test_states_ascending_and_popcount_constant():
    b = es.enumerate_sector(6, 2)
    states = np.asarray(b.states)
    assert np.all(np.diff(states) > 0)
    assert all(bin(int(m)).count("1") == 2 for m in states)


def test_mask_1100_sits_at_index_5():
    b = es.enumerate_sector(4, 2)
    assert list(b.states) == [0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]
    assert es.index_of(b, 0b1100) == 5


def test_polarized_sectors_are_singletons():
    assert list(es.enumerate_sector(5, 0).states) == [0]
    assert list(es.enumerate_sector(5, 5).states) == [0b11111]


def test_index_of_rejects_nonmembers():
    b = es.enumerate_sector(4, 2)
    with pytest.raises(ValueError):
        es.index_of(b, 0b0111)
    with pytest.raises(ValueError):
        es.index_of(b, 0b0000)


def test_indices_of_matches_scalar_lookup():
    b = es.enumerate_sector(8, 3)
    masks = np.asarray(b.states)[[0, 7, 20, b.dim - 1]]
    idx = es.indices_of(b, masks)
    assert list(idx) == [es.index_of(b, int(m)) for m in masks]
    with pytest.raises(ValueError):
        es.indices_of(b, np.array([0b00000011, 0b11110000]))


def test_enumeration_bounds():
    with pytest.raises(ValueError):
        es.enumerate_sector(0, 0)
    with pytest.raises(ValueError):
        es.enumerate_sector(25, 12)
    with pytest.raises(ValueError):
        es.enumerate_sector(4, 5)
    with pytest.raises(ValueError):
        es.enumerate_sector(4, -1)


def test_states_are_read_only():
    b = es.enumerate_sector(4, 2)
    with pytest.raises(ValueError):
        b.states[0] = 99


def test_tag_round_trip():
    b = es.enumerate_sector(7, 3)
    again = es.basis_from_tag(b.tag)
    assert again.n_sites == 7 and again.n_up == 3
    assert np.array_equal(again.states, b.states)
    with pytest.raises(ValueError):
        es.basis_from_tag("whatever")


@given(
    n=st.integers(min_value=1, max_value=10),
    data=st.data(),
)
def test_index_round_trip(n, data):
    k = data.draw(st.integers(min_value=0, max_value=n))
    b = es.enumerate_sector(n, k)
    i = data.draw(st.integers(min_value=0, max_value=b.dim - 1))
    assert es.index_of(b, int(b.states[i])) == i
