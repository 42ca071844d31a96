import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import P
from ship.binning import (
    HASH_ACCESSES,
    KEY_SHIFT,
    build_bins,
    build_perfect_hash,
    lookup_bin,
    verify_injective,
)


def test_shared_key_one_bin():
    bins = build_bins([P("2001:db8::/32"), P("2001:db8:1::/48")])
    assert len(bins) == 1 and len(bins[0].members) == 2


def test_distinct_keys_two_bins():
    bins = build_bins([P("2001::/23"), P("3001::/23")])
    assert [len(b.members) for b in bins] == [1, 1]
    assert all(m.value >> KEY_SHIFT == b.key23 for b in bins for m in b.members)


def test_empty_and_short_input():
    assert build_bins([]) == []
    with pytest.raises(ValueError):
        build_bins([P("2001::/16")])


def test_empty_hash_returns_null():
    bt = build_perfect_hash([])
    assert lookup_bin(bt, 0x2001 << 112) == (None, HASH_ACCESSES)


def test_three_keys_minimal():
    keys = [5, 77, 4_000_000]
    bt = build_perfect_hash(keys)
    assert bt.n_slots == 3
    assert sorted(bt.slot_of(k) for k in keys) == [0, 1, 2]
    for i, k in enumerate(keys):
        assert lookup_bin(bt, k << KEY_SHIFT) == (i, 2)


def test_thousand_random_keys_injective():
    keys = random.Random(3).sample(range(1 << 23), 1000)
    bt = build_perfect_hash(keys, seed=11)
    verify_injective(bt)
    assert len({bt.slot_of(k) for k in keys}) == 1000


def test_foreign_key_rejected():
    rng = random.Random(4)
    keys = rng.sample(range(1 << 23), 300)
    bt = build_perfect_hash(keys)
    foreign = set(range(1 << 23)) - set(keys)
    for k in rng.sample(sorted(foreign)[:100000], 2000):
        idx, acc = lookup_bin(bt, (k << KEY_SHIFT) | rng.getrandbits(KEY_SHIFT))
        assert idx is None and acc == 2


def test_load_factor_and_errors():
    bt = build_perfect_hash(range(100), load_factor=0.5)
    assert bt.n_slots == 200
    with pytest.raises(ValueError):
        build_perfect_hash([1, 1])
    with pytest.raises(ValueError):
        build_perfect_hash([1], load_factor=0)


def test_deterministic():
    keys = random.Random(9).sample(range(1 << 23), 500)
    a, b = build_perfect_hash(keys, seed=2), build_perfect_hash(keys, seed=2)
    assert a.displacements == b.displacements and a.slots == b.slots


def test_memory_linear_in_bins():
    rng = random.Random(5)
    sizes = [1000, 2000, 4000, 8000]
    mem = [build_perfect_hash(rng.sample(range(1 << 23), m)).memory_bytes(60) for m in sizes]
    per = [b / m for b, m in zip(mem, sizes)]
    assert max(per) - min(per) < 0.1 * min(per)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(0, (1 << 23) - 1), unique=True, max_size=400), st.integers(0, 100))
def test_totality(keys, seed):
    bt = build_perfect_hash(keys, seed=seed)
    for i, k in enumerate(keys):
        assert lookup_bin(bt, k << KEY_SHIFT) == (i, 2)


def test_small_full_tables_always_build():
    # few keys means few, large buckets; construction must still succeed at load 1
    for t in range(2000):
        r = random.Random(t)
        ks = r.sample(range(1 << 23), r.randint(1, 60))
        bt = build_perfect_hash(ks, seed=t)
        assert bt.n_slots == len(ks)
        verify_injective(bt)
