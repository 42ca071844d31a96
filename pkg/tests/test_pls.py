from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import P
from ship.pls import PlsPartition, choose_bounds, length_histogram, split_bin
from ship.prefix import normalize_to_23


def test_histogram():
    ps = [P("2001:db8::/32"), P("2001:db9::/32"), P("2001:dba::/32"), P("2001:db8:1::/48")]
    assert length_histogram(ps) == {32: 3, 48: 1}
    assert length_histogram([]) == {}


def test_realstyle_peaks_and_bounds(realstyle25k):
    hist = length_histogram(realstyle25k.entries)
    top2 = sorted(hist, key=hist.get, reverse=True)[:2]
    assert sorted(top2) == [32, 48]
    norm = normalize_to_23(realstyle25k.entries)
    assert choose_bounds(length_histogram(norm.entries), 3).bounds == (32, 48, 64)


def test_k1_single_group():
    assert choose_bounds({32: 5, 48: 9, 64: 1}, 1).bounds == (64,)


def test_degenerate_histogram_reduces_k():
    part = choose_bounds({32: 100}, 3)
    assert part.bounds == (32,) and part.k == 1


def test_ties_go_to_shorter_length():
    assert choose_bounds({30: 5, 40: 5, 50: 1}, 2).bounds == (30, 50)


def test_empty_histogram():
    assert choose_bounds({}, 3).bounds == (128,)


def test_split_bin_examples():
    part = PlsPartition((32, 48, 64))
    a, b = P("2001:db8::/32"), P("2001:db8:1::/48")
    groups = split_bin([a, b], part)
    assert [g.members for g in groups] == [[a], [b], []]
    only64 = [P("2001:db8:0:1::/64"), P("2001:db8:0:2::/64")]
    assert [len(g.members) for g in split_bin(only64, part)] == [0, 0, 2]


def test_split_out_of_range():
    with pytest.raises(ValueError):
        split_bin([P("2001:db8::/96")], PlsPartition((32, 64)))


def test_group_sizes_match_histogram(realstyle25k):
    norm = normalize_to_23(realstyle25k.entries)
    hist = length_histogram(norm.entries)
    part = choose_bounds(hist, 3)
    sizes = Counter()
    for p in norm.entries:
        sizes[part.group_of(p.length)] += 1
    for g, (lo, hi) in enumerate(part.ranges()):
        assert sizes[g] == sum(c for n, c in hist.items() if lo < n <= hi)


@settings(max_examples=80, deadline=None)
@given(st.dictionaries(st.integers(23, 128), st.integers(1, 1000), min_size=1, max_size=30), st.integers(1, 6))
def test_bounds_properties(hist, k):
    part = choose_bounds(hist, k)
    assert part == choose_bounds(dict(hist), k)
    assert part.k <= k and part.bounds[-1] == max(hist)
    ranked = sorted(hist, key=lambda n: (-hist[n], n))[:k - 1]
    assert all(u in ranked for u in part.bounds[:-1])
    # disjoint cover of every present length
    for n in hist:
        assert sum(lo < n <= hi for lo, hi in part.ranges()) == 1
