"""Level 1: address block bins on the 23 MSBs and their perfect hash table."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .hashing import seeded
from .prefix import ADDR_BITS, BIN_BITS, Ipv6Prefix

KEY_SHIFT = ADDR_BITS - BIN_BITS
# One read for the bucket displacement, one for the slot.
HASH_ACCESSES = 2
BUCKET_SIZE = 5
_ANCHOR_TRIES = 48
_MAX_D0 = 256


class PerfectHashError(RuntimeError):
    def __init__(self, seeds):
        super().__init__(f"perfect hash construction failed for seeds {list(seeds)}")
        self.seeds = list(seeds)


@dataclass
class AddressBlockBin:
    key23: int
    members: list[Ipv6Prefix] = field(default_factory=list)


def build_bins(entries: Iterable[Ipv6Prefix]) -> list[AddressBlockBin]:
    """Cluster normalised prefixes on their 23 MSBs, one bin per distinct key, sorted by key."""
    bins: dict[int, AddressBlockBin] = {}
    for p in entries:
        if p.length < BIN_BITS:
            raise ValueError(f"{p} is shorter than /{BIN_BITS}; normalise first")
        key = p.value >> KEY_SHIFT
        b = bins.get(key)
        if b is None:
            b = bins[key] = AddressBlockBin(key)
        b.members.append(p)
    return [bins[k] for k in sorted(bins)]


def _hash_parts(key: int, seed: int, n_slots: int, n_buckets: int):
    h = seeded(key, seed)
    bucket = (h >> 40) % n_buckets
    f1 = h % n_slots
    f2 = 1 + ((h >> 20) % (n_slots - 1)) if n_slots > 1 else 0
    return bucket, f1, f2


@dataclass
class BinningTable:
    """CHD-style perfect hash from key23 to bin index.

    ``slots[i]`` is ``(key23, bin_index)`` or ``None``. Storing the key lets a
    foreign key that lands on an occupied slot be rejected.
    """

    n_slots: int
    seed: int
    n_buckets: int
    displacements: list[int]
    slots: list[Optional[tuple[int, int]]]
    keys: list[int]

    @property
    def n_bins(self) -> int:
        return len(self.keys)

    def slot_of(self, key: int) -> int:
        bucket, f1, f2 = _hash_parts(key, self.seed, self.n_slots, self.n_buckets)
        d = self.displacements[bucket]
        d0, d1 = divmod(d, self.n_slots)
        return (f1 + d0 * f2 + d1) % self.n_slots

    def displacement_bits(self) -> int:
        return max(1, max(self.displacements, default=0).bit_length())

    def descriptor_bytes(self) -> int:
        # seed, slot count and bucket count as 32-bit words, then the displacement array
        return 12 + math.ceil(self.n_buckets * self.displacement_bits() / 8)

    def memory_bytes(self, slot_bits: int) -> int:
        return self.n_slots * math.ceil(slot_bits / 8) + self.descriptor_bytes()


def _try_build(keys: list[int], n_slots: int, seed: int, bucket_size: int = BUCKET_SIZE) -> Optional[BinningTable]:
    m = len(keys)
    n_buckets = max(1, math.ceil(m / bucket_size))
    parts = [_hash_parts(k, seed, n_slots, n_buckets) for k in keys]
    buckets: dict[int, list[int]] = {}
    for i, (b, _, _) in enumerate(parts):
        buckets.setdefault(b, []).append(i)
    order = sorted(buckets, key=lambda b: (-len(buckets[b]), b))

    occupied = bytearray(n_slots)
    free = list(range(n_slots))
    where = list(range(n_slots))
    rng = random.Random(seed)
    displacements = [0] * n_buckets
    slots: list[Optional[tuple[int, int]]] = [None] * n_slots

    def take(slot):
        occupied[slot] = 1
        i = where[slot]
        last = free.pop()
        if last != slot:
            free[i] = last
            where[last] = i

    for b in order:
        members = buckets[b]
        done = False
        for d0 in range(min(n_slots, _MAX_D0)):
            base = [(parts[i][1] + d0 * parts[i][2]) % n_slots for i in members]
            if len(set(base)) != len(base):
                continue
            anchors = free if len(free) <= _ANCHOR_TRIES else rng.sample(free, _ANCHOR_TRIES)
            for f in anchors:
                d1 = (f - base[0]) % n_slots
                if all(not occupied[(x + d1) % n_slots] for x in base[1:]):
                    displacements[b] = d0 * n_slots + d1
                    for i, x in zip(members, base):
                        s = (x + d1) % n_slots
                        take(s)
                        slots[s] = (keys[i], i)
                    done = True
                    break
            if done:
                break
        if not done:
            return None
    return BinningTable(n_slots, seed, n_buckets, displacements, slots, list(keys))


def build_perfect_hash(keys: Iterable[int], load_factor: float = 1.0, seed: int = 0,
                       max_seeds: int = 16) -> BinningTable:
    """Perfect hash over distinct 23-bit keys; ``slots[...][1]`` is the key's position in ``keys``."""
    keys = list(keys)
    if not 0 < load_factor <= 1:
        raise ValueError("load_factor must be in (0, 1]")
    if len(set(keys)) != len(keys):
        raise ValueError("bin keys must be distinct")
    if not keys:
        return BinningTable(0, seed, 1, [0], [], [])
    n_slots = math.ceil(len(keys) / load_factor)
    tried = []
    # a few large buckets can fail to fill a fully loaded table; fall back to smaller ones
    for bucket_size in sorted({BUCKET_SIZE, 2, 1}, reverse=True):
        for attempt in range(max_seeds):
            s = seed + attempt
            tried.append(s)
            bt = _try_build(keys, n_slots, s, bucket_size)
            if bt is not None:
                verify_injective(bt)
                return bt
    raise PerfectHashError(sorted(set(tried)))


def verify_injective(bt: BinningTable) -> None:
    """Exhaustive check: every key reaches its own slot and no two keys share one."""
    seen = set()
    for i, k in enumerate(bt.keys):
        s = bt.slot_of(k)
        if s in seen or bt.slots[s] != (k, i):
            raise PerfectHashError([bt.seed])
        seen.add(s)


def lookup_bin(bt: BinningTable, addr: int) -> tuple[Optional[int], int]:
    """Return (bin index or None, memory accesses). The access count is always 2."""
    if bt.n_slots == 0:
        return None, HASH_ACCESSES
    key = addr >> KEY_SHIFT
    entry = bt.slots[bt.slot_of(key)]
    if entry is None or entry[0] != key:
        return None, HASH_ACCESSES
    return entry[1], HASH_ACCESSES
