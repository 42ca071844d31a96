"""Hybrid trie-tree build, lookup and leaf enumeration."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from ..prefix import ADDR_BITS, MISS, Ipv6Prefix, LookupResult
from .config import HttConfig
from .nodes import LeafEntry, LeafNode, TrieNode, decode_node, encode_node, leaf_capacity
from .region import Entry, Region, Split, count_partitions, prune_covering
from .snm import apply_snm, blocks_from_arrays, locate_child


class HttBuildError(RuntimeError):
    pass


@dataclass
class HttStructure:
    """Flat array of encoded node images; node 0 is the root.

    ``offset`` is the number of address bits consumed before this tree (23
    under the binning level, 0 for a stand-alone tree).
    """

    images: list[int]
    cfg: HttConfig
    offset: int
    _decoded: Optional[list] = field(default=None, repr=False, compare=False)

    @property
    def width(self) -> int:
        return ADDR_BITS - self.offset

    @property
    def n_nodes(self) -> int:
        return len(self.images)

    @property
    def nbytes(self) -> int:
        return self.n_nodes * self.cfg.node_bytes

    def nodes(self) -> list:
        if self._decoded is None:
            self._decoded = [decode_node(img, self.cfg) for img in self.images]
        return self._decoded


def to_entries(prefixes: Iterable[Ipv6Prefix], offset: int) -> list[Entry]:
    width = ADDR_BITS - offset
    mask = (1 << width) - 1
    return sorted({(p.value & mask, max(0, p.length - offset), p.priority_length, p.nhi) for p in prefixes})


def _remainder_bits(members: list[Entry], depth: int) -> int:
    return max((l - depth for _, l, _, _ in members if l > depth), default=0)


class _Builder:
    def __init__(self, cfg: HttConfig, width: int):
        self.cfg = cfg
        self.width = width
        self.nodes: list = []

    def leaf_ok(self, region: Region) -> bool:
        return (len(region.members) <= self.cfg.leaf_threshold_b
                and _remainder_bits(region.members, region.depth) <= self.cfg.max_remainder_bits)

    def alloc(self, count: int) -> int:
        base = len(self.nodes)
        if base + count > (1 << self.cfg.pointer_bits):
            raise HttBuildError(f"tree exceeds {1 << self.cfg.pointer_bits} nodes")
        self.nodes.extend([None] * count)
        return base

    def place_leaf(self, idx: int, region: Region):
        d = region.depth
        u = _remainder_bits(region.members, d)
        entries = []
        for a, l, prio, nhi in sorted(region.members, key=lambda m: (-m[1], m[0])):
            r = max(0, l - d)
            rem = (a >> (self.width - l)) & ((1 << r) - 1) if r else 0
            entries.append(LeafEntry(rem << (u - r), prio, nhi))
        cap = leaf_capacity(u, self.cfg)
        chunks = [entries[i:i + cap] for i in range(0, len(entries), cap)] or [[]]
        slots = [idx] + [self.alloc(1) for _ in chunks[1:]]
        for i, chunk in enumerate(chunks):
            more = i + 1 < len(chunks)
            node = LeafNode(u, tuple(chunk), slots[i + 1] if more else 0, more)
            self.nodes[slots[i]] = encode_node(node, self.cfg)

    def build(self, members: list[Entry]) -> list[int]:
        root = Region(0, 0, prune_covering(members, 0))
        self.alloc(1)
        if self.leaf_ok(root):
            self.place_leaf(0, root)
            return self.nodes
        stack = [(0, root)]
        cfg = self.cfg
        while stack:
            idx, region = stack.pop()
            if region.depth >= self.width:
                raise HttBuildError(f"{len(region.members)} prefixes cannot be separated at region "
                                    f"depth={region.depth} value={region.value:#x}")
            decision = count_partitions(region.members, region.depth, self.width, cfg.max_stride_bits)
            split = Split(region, decision.cuts, self.width)
            layout = apply_snm(split.block_count, decision.cuts, cfg.snm_array_len_L, cfg.merge_threshold)
            base = self.alloc(layout.n_children)
            for i, (start, w) in enumerate(layout.blocks):
                child = split.block_region(start, w)
                if self.leaf_ok(child):
                    self.place_leaf(base + i, child)
                else:
                    stack.append((base + i, child))
            self.nodes[idx] = encode_node(TrieNode(decision.cuts, base, layout.ltoh, layout.htol), cfg)
        return self.nodes


def build_htt(prefixes: Iterable[Ipv6Prefix], cfg: HttConfig, offset: int = 23) -> HttStructure:
    """Build one hybrid trie-tree over ``prefixes``, matching address bits from ``offset`` on."""
    members = to_entries(prefixes, offset)
    if not members:
        raise ValueError("cannot build a tree over an empty group")
    return build_from_entries(members, cfg, offset)


def build_from_entries(members: list[Entry], cfg: HttConfig, offset: int) -> HttStructure:
    images = _Builder(cfg, ADDR_BITS - offset).build(members)
    return HttStructure(images, cfg, offset)


def lookup_htt(htt: HttStructure, key: int) -> tuple[LookupResult, int]:
    """Walk the tree for ``key`` (the address bits below ``offset``); returns (result, node reads)."""
    nodes = htt.nodes()
    width = htt.width
    offset = htt.offset
    node = nodes[0]
    depth = 0
    accesses = 1
    while type(node) is TrieNode:
        s = node.cuts
        bits = (key >> (width - depth - s)) & ((1 << s) - 1)
        i, w = locate_child(bits, node.ltoh, node.htol, s)
        depth += s - (w.bit_length() - 1)
        node = nodes[node.child_base + i]
        accesses += 1
    best_len = -1
    best_nhi = 0
    while True:
        u = node.lsr
        for e in node.entries:
            r = e.length - offset - depth
            if r <= 0:
                hit = True
            else:
                hit = ((key >> (width - depth - r)) & ((1 << r) - 1)) == (e.remainder >> (u - r))
            if hit and e.length > best_len:
                best_len = e.length
                best_nhi = e.nhi
        if not node.continued:
            break
        node = nodes[node.continuation]
        accesses += 1
    if best_len < 0:
        return MISS, accesses
    return LookupResult(True, best_len, best_nhi), accesses


@dataclass(frozen=True)
class LeafInfo:
    node: int
    depth: int
    value: int
    trie_nodes: int
    chain: int

    @property
    def accesses(self) -> int:
        return self.trie_nodes + self.chain


def iter_leaves(htt: HttStructure) -> Iterator[LeafInfo]:
    """Every leaf reachable from the root, recovered from the node images alone."""
    nodes = htt.nodes()
    stack = [(0, 0, 0, 0)]
    while stack:
        idx, depth, value, trie = stack.pop()
        node = nodes[idx]
        if type(node) is TrieNode:
            s = node.cuts
            for i, (start, w) in enumerate(blocks_from_arrays(node.ltoh, node.htol, s)):
                k = w.bit_length() - 1
                stack.append((node.child_base + i, depth + s - k, (value << (s - k)) | (start >> k), trie + 1))
        else:
            chain = 1
            while node.continued:
                node = nodes[node.continuation]
                chain += 1
            yield LeafInfo(idx, depth, value, trie, chain)


def witness_key(htt: HttStructure, leaf: LeafInfo) -> int:
    """A key that lands in ``leaf`` (region bits followed by zeros)."""
    return leaf.value << (htt.width - leaf.depth)
