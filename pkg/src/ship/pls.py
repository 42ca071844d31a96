"""Level 2: prefix length sorting into K disjoint length ranges."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping

from .prefix import ADDR_BITS, BIN_BITS, Ipv6Prefix

MAX_GROUPS = 6


@dataclass(frozen=True)
class PlsPartition:
    """Groups are the ranges (bounds[i-1], bounds[i]], the first starting after /22."""

    bounds: tuple[int, ...]

    def __post_init__(self):
        if not self.bounds:
            raise ValueError("partition needs at least one bound")
        if any(a >= b for a, b in zip(self.bounds, self.bounds[1:])):
            raise ValueError("bounds must be strictly ascending")
        if self.bounds[0] < BIN_BITS or self.bounds[-1] > ADDR_BITS:
            raise ValueError("bounds out of range")

    @property
    def k(self) -> int:
        return len(self.bounds)

    def ranges(self) -> list[tuple[int, int]]:
        lows = (BIN_BITS - 1,) + self.bounds[:-1]
        return list(zip(lows, self.bounds))

    def group_of(self, length: int) -> int:
        for i, u in enumerate(self.bounds):
            if length <= u:
                if length < BIN_BITS:
                    break
                return i
        raise ValueError(f"length /{length} outside partition {self.bounds}")


@dataclass
class PlsGroup:
    range: tuple[int, int]
    members: list[Ipv6Prefix]


def length_histogram(entries: Iterable[Ipv6Prefix]) -> dict[int, int]:
    return dict(sorted(Counter(p.length for p in entries).items()))


def choose_bounds(hist: Mapping[int, int], k: int) -> PlsPartition:
    """Peak lengths become inclusive upper bounds; the last group takes the rest.

    The k-1 most populous lengths are picked (ties go to the shorter length).
    A peak at the longest present length is folded into the final group, so k
    shrinks when the histogram cannot support it.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    present = sorted(n for n, c in hist.items() if c > 0)
    if not present:
        return PlsPartition((ADDR_BITS,))
    top = present[-1]
    ranked = sorted(present, key=lambda n: (-hist[n], n))
    peaks = sorted(n for n in ranked[:k - 1] if n != top)
    return PlsPartition(tuple(peaks) + (top,))


def split_bin(members: Iterable[Ipv6Prefix], part: PlsPartition) -> list[PlsGroup]:
    groups = [PlsGroup(r, []) for r in part.ranges()]
    for p in members:
        groups[part.group_of(p.length)].members.append(p)
    return groups
