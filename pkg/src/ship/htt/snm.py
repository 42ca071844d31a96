"""Selective Node Merge and child-index computation."""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable

# block_count(start, width) -> distinct prefixes in the aligned block of
# `width` equi-sized regions starting at `start`
BlockCounter = Callable[[int, int], int]


@dataclass(frozen=True)
class SnmLayout:
    cuts: int
    blocks: tuple[tuple[int, int], ...]  # (start, width) in memory order
    ltoh: tuple[int, ...]
    htol: tuple[int, ...]

    @property
    def n_children(self) -> int:
        return len(self.blocks)


def apply_snm(block_count: BlockCounter, cuts: int, array_len: int, merge_threshold: int) -> SnmLayout:
    """Merge low-density neighbours from both ends of a 2**cuts region split.

    Two aligned blocks of equal width merge when the merged block holds no
    more prefixes than the fuller of the two, or no more than
    ``merge_threshold``. The upward pass fills ``ltoh`` and always ends on a
    single region, which is what the child-index arithmetic relies on; the
    downward pass fills ``htol`` from the top without crossing into regions
    the upward pass took. Regions reached by neither stay equi-sized.
    """
    n = 1 << cuts

    def mergeable(start, w):
        both = block_count(start, 2 * w)
        return both == max(block_count(start, w), block_count(start + w, w)) or both <= merge_threshold

    low = []
    pos = 0
    while pos < n and len(low) < array_len:
        w = 1
        if len(low) < array_len - 1:
            while pos % (2 * w) == 0 and pos + 2 * w <= n - 1 and mergeable(pos, w):
                w *= 2
        low.append((pos, w))
        pos += w

    high = []
    top = n
    while top > pos and len(high) < array_len:
        w = 1
        while top - 2 * w >= pos and (top - 2 * w) % (2 * w) == 0 and mergeable(top - 2 * w, w):
            w *= 2
        high.append((top - w, w))
        top -= w
    high.reverse()

    blocks = low + [(j, 1) for j in range(pos, top)] + high
    return SnmLayout(cuts, tuple(blocks), tuple(s for s, _ in low), tuple(s for s, _ in high))


def locate_child(bits: int, ltoh, htol, cuts: int) -> tuple[int, int]:
    """Return (child index, block width) for an s-bit destination bit sequence."""
    last = ltoh[-1]
    nl = len(ltoh)
    if bits <= last:
        i = bisect_right(ltoh, bits) - 1
        nxt = ltoh[i + 1] if i + 1 < nl else last + 1
        return i, nxt - ltoh[i]
    if htol and bits >= htol[0]:
        j = bisect_right(htol, bits) - 1
        nxt = htol[j + 1] if j + 1 < len(htol) else 1 << cuts
        return j + htol[0] - last + nl - 1, nxt - htol[j]
    return bits - last + nl - 1, 1


def compute_child_index(bits: int, ltoh, htol) -> int:
    """Child offset from the node's child base; L is taken as ``len(ltoh)``."""
    last = ltoh[-1]
    nl = len(ltoh)
    if bits <= last:
        return bisect_right(ltoh, bits) - 1
    if htol and bits >= htol[0]:
        return bisect_right(htol, bits) - 1 + htol[0] - last + nl - 1
    return bits - last + nl - 1


def blocks_from_arrays(ltoh, htol, cuts: int) -> list[tuple[int, int]]:
    """Rebuild the (start, width) child layout described by a node header."""
    n = 1 << cuts
    out = []
    for i, s in enumerate(ltoh):
        nxt = ltoh[i + 1] if i + 1 < len(ltoh) else s + 1
        out.append((s, nxt - s))
    hi_start = htol[0] if htol else n
    out.extend((j, 1) for j in range(ltoh[-1] + 1, hi_start))
    for i, s in enumerate(htol):
        nxt = htol[i + 1] if i + 1 < len(htol) else n
        out.append((s, nxt - s))
    return out
