import random

from hypothesis import given, settings
from hypothesis import strategies as st

from ship.htt import apply_snm, compute_child_index, locate_child
from ship.htt.region import Region, Split, count_partitions
from ship.htt.snm import blocks_from_arrays

# Three-bit toy space: P1=110/3, P2=111/3, P3=0/0.
P1, P2, P3 = (0b110, 3, 3, 1), (0b111, 3, 3, 2), (0, 0, 0, 3)


def toy3_layout():
    region = Region(0, 0, [P1, P2, P3])
    dec = count_partitions(region.members, 0, 3, 10)
    split = Split(region, dec.cuts, 3)
    return dec, split, apply_snm(split.block_count, dec.cuts, 5, 1)


def test_three_bit_toy_partition_count():
    dec, _, _ = toy3_layout()
    assert dec.np == 4
    assert dec.sm_trace == [6, 16, 34] and dec.smpf == 24


def test_three_bit_toy_merge():
    _, split, layout = toy3_layout()
    assert layout.n_children == 3  # four equi-sized regions stored as three
    assert layout.blocks == ((0, 2), (2, 1), (3, 1))
    assert layout.ltoh == (0, 2, 3) and layout.htol == ()
    copies = sum(P3 in split.block_region(s, w).members for s, w in layout.blocks)
    assert copies - 1 == 2  # without merging P3 would sit in all four regions


def scan_index(blocks, bits):
    """Reference: position of the stored child whose span holds ``bits``."""
    for i, (start, width) in enumerate(blocks):
        if start <= bits < start + width:
            return i
    raise AssertionError(bits)


def test_twelve_region_child_index():
    ltoh, htol = (0, 2, 3), (9, 10, 11)
    assert compute_child_index(10, ltoh, htol) == 9
    # twelve regions: 0-1 merged, then singles
    blocks = [(0, 2), (2, 1), (3, 1)] + [(j, 1) for j in range(4, 9)] + [(9, 1), (10, 1), (11, 1)]
    for bits in range(12):
        assert compute_child_index(bits, ltoh, htol) == scan_index(blocks, bits)


def random_arrays(rng, s, L=5):
    n = 1 << s
    nl = rng.randint(1, min(L, n))
    ltoh = [0] + sorted(rng.sample(range(1, n), nl - 1))
    rest = list(range(ltoh[-1] + 1, n))
    htol = sorted(rng.sample(rest, rng.randint(0, min(L, len(rest)))))
    return tuple(ltoh), tuple(htol)


def reference_blocks(ltoh, htol, n):
    """Spans in memory order: ltoh runs (the last one a single region), untouched singles, htol runs."""
    out = [(a, b - a) for a, b in zip(ltoh, ltoh[1:])] + [(ltoh[-1], 1)]
    stop = htol[0] if htol else n
    out += [(j, 1) for j in range(ltoh[-1] + 1, stop)]
    bounds = list(htol) + [n]
    out += [(a, b - a) for a, b in zip(bounds, bounds[1:])]
    return out


def test_child_index_matches_layout_scan():
    rng = random.Random(7)
    for _ in range(600):
        s = rng.randint(1, 10)
        ltoh, htol = random_arrays(rng, s)
        blocks = reference_blocks(ltoh, htol, 1 << s)
        assert blocks_from_arrays(ltoh, htol, s) == blocks
        for bits in range(1 << s):
            i = compute_child_index(bits, ltoh, htol)
            assert i == scan_index(blocks, bits)
            assert locate_child(bits, ltoh, htol, s) == (i, blocks[i][1])


def test_all_empty_merges_maximally():
    layout = apply_snm(lambda start, w: 0, 4, 5, 12)
    for start, w in layout.blocks:
        assert start % w == 0 and w & (w - 1) == 0
    assert len(layout.ltoh) <= 5 and len(layout.htol) <= 5
    assert layout.blocks[0] == (0, 8)
    assert layout.n_children < 16


def test_no_merge_identity():
    # every region holds a distinct prefix and the threshold is 0: nothing merges
    layout = apply_snm(lambda start, w: w + 20, 3, 5, 0)
    assert layout.n_children == 8
    assert all(w == 1 for _, w in layout.blocks)


def _lpm(members, key, width):
    best = None
    for a, l, prio, nhi in members:
        if l == 0 or key >> (width - l) == a >> (width - l):
            if best is None or prio > best[0]:
                best = (prio, nhi)
    return best


@st.composite
def regions(draw):
    width = draw(st.integers(4, 12))
    n = draw(st.integers(1, 40))
    members = set()
    for _ in range(n):
        l = draw(st.integers(0, width))
        a = draw(st.integers(0, (1 << width) - 1)) >> (width - l) << (width - l) if l else 0
        members.add((a, l, l, draw(st.integers(0, 255))))
    return width, sorted(members)


@settings(max_examples=150, deadline=None)
@given(regions(), st.integers(0, 20), st.integers(1, 5))
def test_merge_preserves_match_semantics(reg, threshold, L):
    width, members = reg
    region = Region(0, 0, members)
    dec = count_partitions(members, 0, width, 10)
    split = Split(region, dec.cuts, width)
    layout = apply_snm(split.block_count, dec.cuts, L, threshold)
    covered = []
    for start, w in layout.blocks:
        covered.extend(range(start, start + w))
        child = split.block_region(start, w)
        # the count used for merging does not apply covering-prefix pruning
        assert split.block_count(start, w) >= len(child.members)
        for j in range(start, start + w):
            for low in (0, (1 << (width - dec.cuts)) - 1):
                key = (j << (width - dec.cuts)) | low
                assert _lpm(child.members, key, width) == _lpm(members, key, width)
    assert covered == list(range(1 << dec.cuts))
    assert len(layout.ltoh) <= L and len(layout.htol) <= L
    for start, w in layout.blocks:
        assert w & (w - 1) == 0 and start % w == 0
