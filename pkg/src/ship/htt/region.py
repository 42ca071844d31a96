"""Region arithmetic over the HTT key space and the partition-count heuristic.

A key is the ``width`` address bits left after the levels above the HTT. A
region at ``depth`` d with ``value`` v holds every key whose top d bits are v.
Prefixes are ``(a, l, prio, nhi)`` tuples: ``a`` is the prefix bits
left-aligned in ``width`` bits, ``l`` the number of significant key bits,
``prio`` the original prefix length and ``nhi`` the next hop.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import accumulate

Entry = tuple[int, int, int, int]


@dataclass
class Region:
    depth: int
    value: int
    members: list[Entry]


def prune_covering(members: list[Entry], depth: int) -> list[Entry]:
    """Keep only the longest of the prefixes that span the whole region.

    Nested prefixes that cover a region all match every key in it, so the
    longest one shadows the rest.
    """
    best = None
    out = []
    for m in members:
        if m[1] <= depth:
            if best is None or (m[1], m[2]) > (best[1], best[2]):
                best = m
        else:
            out.append(m)
    if best is not None:
        out.append(best)
    return out


def overlap_total(members: list[Entry], depth: int, cuts: int) -> int:
    """Sum over the 2**cuts sub-regions of the prefixes overlapping each (with replication)."""
    end = depth + cuts
    return sum(1 if l >= end else 1 << (end - max(l, depth)) for _, l, _, _ in members)


@dataclass
class PartitionDecision:
    np: int
    sm_trace: list[int] = field(default_factory=list)
    smpf: int = 0

    @property
    def cuts(self) -> int:
        return self.np.bit_length() - 1


def count_partitions(members: list[Entry], depth: int, width: int, max_stride_bits: int) -> PartitionDecision:
    """Double the partition count while the space measure stays within 8x the prefix count.

    Sm(Np) = sum of per-sub-region prefix counts + Np + Sm(previous Np),
    starting from Sm(1) = 0. Returns the last Np with Sm <= Smpf, at least 2.
    """
    smpf = 8 * len(members)
    cap = min(max_stride_bits, width - depth)
    if cap < 1:
        raise ValueError("region is already at full key depth")
    trace = []
    prev = 0
    best = 2
    for s in range(1, cap + 1):
        np_ = 1 << s
        sm = overlap_total(members, depth, s) + np_ + prev
        trace.append(sm)
        if sm > smpf:
            break
        best = np_
        prev = sm
    return PartitionDecision(best, trace, smpf)


class Split:
    """A region cut into 2**cuts equi-sized sub-regions, queried by aligned block."""

    def __init__(self, region: Region, cuts: int, width: int):
        self.region = region
        self.cuts = cuts
        self.width = width
        d = region.depth
        end = d + cuts
        n = 1 << cuts
        mask = n - 1
        inner: list[list[Entry]] = [[] for _ in range(n)]
        partial = []  # (first sub-region, count, entry)
        covering = []
        shift = width - end
        for m in region.members:
            a, l = m[0], m[1]
            if l >= end:
                inner[(a >> shift) & mask].append(m)
            elif l > d:
                span = end - l
                partial.append((((a >> shift) & mask) >> span << span, 1 << span, m))
            else:
                covering.append(m)
        self.inner = inner
        self.partial = partial
        self.covering = covering
        self.cum = [0, *accumulate(len(x) for x in inner)]

    def _block_depth(self, w: int) -> int:
        return self.region.depth + self.cuts - (w.bit_length() - 1)

    def block_count(self, start: int, w: int) -> int:
        depth = self._block_depth(w)
        n = self.cum[start + w] - self.cum[start]
        covered = bool(self.covering)
        stop = start + w
        for first, cnt, m in self.partial:
            if first < stop and start < first + cnt:
                if m[1] <= depth:
                    covered = True
                else:
                    n += 1
        return n + covered

    def block_region(self, start: int, w: int) -> Region:
        depth = self._block_depth(w)
        members = []
        for j in range(start, start + w):
            members.extend(self.inner[j])
        stop = start + w
        for first, cnt, m in self.partial:
            if first < stop and start < first + cnt:
                members.append(m)
        members.extend(self.covering)
        value = (self.region.value << (depth - self.region.depth)) | (start >> (w.bit_length() - 1))
        return Region(depth, value, prune_covering(members, depth))
