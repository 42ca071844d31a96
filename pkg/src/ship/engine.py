"""End-to-end SHIP index: two-level build, lookup with priority resolution, footprint."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Optional

from .binning import KEY_SHIFT, BinningTable, build_bins, build_perfect_hash, lookup_bin
from .htt import HttBuildError, HttConfig, HttStructure, build_htt, iter_leaves, lookup_htt, witness_key
from .pls import PlsPartition, choose_bounds, length_histogram, split_bin
from .prefix import BIN_BITS, MISS, Ipv6Prefix, LookupResult, normalize_to_23, prefix_mask

# Prefixes shorter than this are kept as covers instead of being expanded into /23 bins.
LAZY_BELOW = 16
KEY_MASK = (1 << KEY_SHIFT) - 1


@dataclass
class ShipIndex:
    """``k == 0`` is the reference layout: one tree over the whole table, no binning."""

    k: int
    cfg: HttConfig
    partition: Optional[PlsPartition]
    binning: Optional[BinningTable]
    htts: dict[tuple[int, int], HttStructure]
    lazy: list[Ipv6Prefix] = field(default_factory=list)
    n_prefixes: int = 0
    prefix_bytes: int = 0
    _covers: Optional[CoverSet] = field(default=None, repr=False, compare=False)

    @property
    def covers(self) -> CoverSet:
        if self._covers is None:
            self._covers = CoverSet(self.lazy)
        return self._covers

    @property
    def bin_keys(self) -> list[int]:
        return self.binning.keys if self.binning else []


@dataclass(frozen=True)
class LookupStats:
    hash_accesses: int
    htt_accesses_max: int
    htt_accesses: tuple[int, ...] = ()

    @property
    def total_accesses(self) -> int:
        return self.hash_accesses + self.htt_accesses_max


@dataclass(frozen=True)
class Footprint:
    binning_bytes: int
    htt_bytes: int
    n_slots: int
    n_bins: int
    n_nodes: int
    n_prefixes: int
    prefix_bytes: int

    @property
    def total_bytes(self) -> int:
        return self.binning_bytes + self.htt_bytes

    @property
    def bytes_per_prefix(self) -> float:
        return self.total_bytes / self.n_prefixes if self.n_prefixes else 0.0

    @property
    def bytes_per_prefix_byte(self) -> float:
        return self.total_bytes / self.prefix_bytes if self.prefix_bytes else 0.0

    @property
    def htt_bytes_per_prefix_byte(self) -> float:
        return self.htt_bytes / self.prefix_bytes if self.prefix_bytes else 0.0

    def as_dict(self) -> dict:
        return {
            "binning_bytes": self.binning_bytes, "htt_bytes": self.htt_bytes,
            "total_bytes": self.total_bytes, "n_slots": self.n_slots, "n_bins": self.n_bins,
            "n_nodes": self.n_nodes, "n_prefixes": self.n_prefixes, "prefix_bytes": self.prefix_bytes,
            "bytes_per_prefix": round(self.bytes_per_prefix, 4),
            "bytes_per_prefix_byte": round(self.bytes_per_prefix_byte, 4),
            "htt_bytes_per_prefix_byte": round(self.htt_bytes_per_prefix_byte, 4),
        }


class CoverSet:
    """Short prefixes kept out of the bins, matched by one probe per distinct length."""

    def __init__(self, covers: Iterable[Ipv6Prefix]):
        self.by_len: dict[int, dict[int, Ipv6Prefix]] = {}
        for p in covers:
            self.by_len.setdefault(p.length, {})[p.value] = p
        self.lengths = sorted(self.by_len, reverse=True)

    def best(self, addr: int) -> Optional[Ipv6Prefix]:
        for length in self.lengths:
            p = self.by_len[length].get(addr & prefix_mask(length))
            if p is not None:
                return p
        return None


def build_ship(table: Iterable[Ipv6Prefix], k: int = 3, cfg: Optional[HttConfig] = None, seed: int = 0,
               load_factor: float = 1.0, lazy_below: int = LAZY_BELOW) -> ShipIndex:
    cfg = cfg or HttConfig()
    prefixes = list(table)
    n_prefixes = len(prefixes)
    prefix_bytes = sum((p.length + 7) // 8 for p in prefixes)
    if k == 0:
        htts = {}
        while prefixes:
            try:
                htts[(0, 0)] = build_htt(prefixes, cfg, offset=0)
                break
            except HttBuildError:
                # a whole-table tree can outgrow 16-bit child pointers; widen them
                if cfg.pointer_bits >= 32:
                    raise
                cfg = replace(cfg, pointer_bits=cfg.pointer_bits + 4)
        return ShipIndex(0, cfg, None, None, htts, [], n_prefixes, prefix_bytes)
    if not 1 <= k <= 15:
        raise ValueError("k must be in 0..15")

    norm = normalize_to_23(prefixes, lazy_below=lazy_below)
    bins = build_bins(norm.entries)
    lazy = norm.lazy
    if lazy:
        covers = CoverSet(lazy)
        for b in bins:
            base = b.key23 << KEY_SHIFT
            if not any(p.length == BIN_BITS for p in b.members):
                cover = covers.best(base)
                if cover is not None:
                    b.members.append(Ipv6Prefix(base, BIN_BITS, cover.nhi, cover.length))
    partition = choose_bounds(length_histogram(norm.entries), k)
    binning = build_perfect_hash([b.key23 for b in bins], load_factor=load_factor, seed=seed)
    htts = {}
    for i, b in enumerate(bins):
        for g, group in enumerate(split_bin(b.members, partition)):
            if group.members:
                htts[(i, g)] = build_htt(group.members, cfg, offset=BIN_BITS)
    return ShipIndex(k, cfg, partition, binning, htts, lazy, n_prefixes, prefix_bytes)


def lookup(index: ShipIndex, addr: int) -> tuple[LookupResult, LookupStats]:
    if index.k == 0:
        htt = index.htts.get((0, 0))
        if htt is None:
            return MISS, LookupStats(0, 0)
        res, acc = lookup_htt(htt, addr)
        return res, LookupStats(0, acc, (acc,))
    b, hash_acc = lookup_bin(index.binning, addr)
    if b is None:
        cover = index.covers.best(addr) if index.lazy else None
        res = LookupResult(True, cover.length, cover.nhi) if cover else MISS
        return res, LookupStats(hash_acc, 0)
    key = addr & KEY_MASK
    best = MISS
    per = []
    for g in range(index.partition.k):
        htt = index.htts.get((b, g))
        if htt is None:
            continue
        res, acc = lookup_htt(htt, key)
        per.append(acc)
        if res.matched and (not best.matched or res.prefix_length > best.prefix_length):
            best = res
    return best, LookupStats(hash_acc, max(per, default=0), tuple(per))


def group_pointer_bits(index: ShipIndex) -> list[int]:
    """Root-pointer width per group: enough to address that group's node bank plus a null."""
    if not index.partition:
        return []
    totals = [0] * index.partition.k
    for (_, g), h in index.htts.items():
        totals[g] += h.n_nodes
    return [max(1, (t + 1).bit_length()) for t in totals]


def slot_bits(index: ShipIndex) -> int:
    return 1 + BIN_BITS + sum(group_pointer_bits(index))


def footprint(index: ShipIndex) -> Footprint:
    htt_bytes = sum(h.nbytes for h in index.htts.values())
    n_nodes = sum(h.n_nodes for h in index.htts.values())
    if index.binning is not None:
        binning_bytes = index.binning.memory_bytes(slot_bits(index))
        n_slots, n_bins = index.binning.n_slots, index.binning.n_bins
    else:
        binning_bytes = n_slots = n_bins = 0
    return Footprint(binning_bytes, htt_bytes, n_slots, n_bins, n_nodes, index.n_prefixes, index.prefix_bytes)


@dataclass(frozen=True)
class Witness:
    addr: int
    bin: int
    group: int
    accesses: int  # structural node reads for the tree that holds the leaf


def iter_witnesses(index: ShipIndex) -> Iterator[Witness]:
    """One address per leaf of every tree."""
    for (b, g), htt in sorted(index.htts.items()):
        hi = 0 if index.k == 0 else index.binning.keys[b] << KEY_SHIFT
        for leaf in iter_leaves(htt):
            yield Witness(hi | witness_key(htt, leaf), b, g, leaf.accesses)


def worst_case_htt_accesses(index: ShipIndex) -> int:
    return max((w.accesses for w in iter_witnesses(index)), default=0)

