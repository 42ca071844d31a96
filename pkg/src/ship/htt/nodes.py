"""Fixed-width node images for the hybrid trie-tree.

Fields are packed MSB-first into an integer ``node_size_bits`` wide and
zero-padded at the low end.

Non-terminal node::

    [type=0:1][cuts:4][child_base:ptr][ltoh:L*10][htol:L*10]

Leaf node::

    [type=1,continued:2][count:4][lsr:6][continuation:ptr]
    then per entry [remainder:lsr][prefix length:8][nhi:8]

The SNM arrays hold region start indices in ascending order. ``ltoh[0]`` is
always 0 and every ``htol`` entry is above the last ``ltoh`` entry, so zero
marks an unused slot in both arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import CUTS_BITS, INDEX_BITS, LEAF_COUNT_BITS, LENGTH_BITS, HttConfig


class EncodeError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class TrieNode:
    cuts: int
    child_base: int
    ltoh: tuple[int, ...]
    htol: tuple[int, ...] = ()


@dataclass(frozen=True, slots=True)
class LeafEntry:
    remainder: int  # left-aligned in lsr bits
    length: int  # original prefix length
    nhi: int


@dataclass(frozen=True, slots=True)
class LeafNode:
    lsr: int
    entries: tuple[LeafEntry, ...]
    continuation: int = 0
    continued: bool = False


class _Writer:
    __slots__ = ("value", "bits")

    def __init__(self):
        self.value = 0
        self.bits = 0

    def put(self, field: int, width: int, name: str):
        if field < 0 or field >> width:
            raise EncodeError(f"{name}={field} does not fit in {width} bits")
        self.value = (self.value << width) | field
        self.bits += width

    def finish(self, total: int) -> int:
        if self.bits > total:
            raise EncodeError(f"node needs {self.bits} bits, node size is {total}")
        return self.value << (total - self.bits)


class _Reader:
    __slots__ = ("value", "pos")

    def __init__(self, value: int, total: int):
        self.value = value
        self.pos = total

    def get(self, width: int) -> int:
        self.pos -= width
        return (self.value >> self.pos) & ((1 << width) - 1)


def leaf_entry_bits(lsr: int, cfg: HttConfig) -> int:
    return lsr + LENGTH_BITS + cfg.nhi_bits


def leaf_capacity(lsr: int, cfg: HttConfig) -> int:
    """Entries that fit in one leaf node for a given unmatched-bit count."""
    room = (cfg.node_size_bits - cfg.leaf_header_bits) // leaf_entry_bits(lsr, cfg)
    return min(room, (1 << LEAF_COUNT_BITS) - 1)


def _check_snm(node: TrieNode, cfg: HttConfig):
    regions = 1 << node.cuts
    lt, ht = node.ltoh, node.htol
    if not lt or lt[0] != 0:
        raise EncodeError("ltoh must start at region 0")
    if len(lt) > cfg.snm_array_len_L or len(ht) > cfg.snm_array_len_L:
        raise EncodeError("SNM array longer than L")
    seq = lt + ht
    if any(a >= b for a, b in zip(seq, seq[1:])) or seq[-1] >= regions:
        raise EncodeError(f"SNM indices must ascend below {regions}: {lt} {ht}")


def encode_node(node, cfg: HttConfig) -> int:
    w = _Writer()
    if isinstance(node, TrieNode):
        if not 1 <= node.cuts <= cfg.max_stride_bits:
            raise EncodeError(f"cuts={node.cuts} outside 1..{cfg.max_stride_bits}")
        _check_snm(node, cfg)
        w.put(0, 1, "type")
        w.put(node.cuts, CUTS_BITS, "cuts")
        w.put(node.child_base, cfg.pointer_bits, "child_base")
        for arr in (node.ltoh, node.htol):
            for i in range(cfg.snm_array_len_L):
                w.put(arr[i] if i < len(arr) else 0, INDEX_BITS, "snm index")
        return w.finish(cfg.node_size_bits)
    if isinstance(node, LeafNode):
        w.put(0b11 if node.continued else 0b10, 2, "type")
        w.put(len(node.entries), LEAF_COUNT_BITS, "count")
        w.put(node.lsr, cfg.lsr_bits, "lsr")
        w.put(node.continuation, cfg.pointer_bits, "continuation")
        for e in node.entries:
            w.put(e.remainder, node.lsr, "remainder")
            w.put(e.length, LENGTH_BITS, "length")
            w.put(e.nhi, cfg.nhi_bits, "nhi")
        return w.finish(cfg.node_size_bits)
    raise TypeError(f"not a node: {node!r}")


def decode_node(image: int, cfg: HttConfig):
    r = _Reader(image, cfg.node_size_bits)
    if r.get(1) == 0:
        cuts = r.get(CUTS_BITS)
        base = r.get(cfg.pointer_bits)
        lt = [r.get(INDEX_BITS) for _ in range(cfg.snm_array_len_L)]
        ht = [r.get(INDEX_BITS) for _ in range(cfg.snm_array_len_L)]
        ltoh = (0,) + tuple(x for x in lt[1:] if x)
        htol = tuple(x for x in ht if x)
        return TrieNode(cuts, base, ltoh, htol)
    continued = bool(r.get(1))
    count = r.get(LEAF_COUNT_BITS)
    lsr = r.get(cfg.lsr_bits)
    cont = r.get(cfg.pointer_bits)
    entries = []
    for _ in range(count):
        rem = r.get(lsr)
        length = r.get(LENGTH_BITS)
        nhi = r.get(cfg.nhi_bits)
        entries.append(LeafEntry(rem, length, nhi))
    return LeafNode(lsr, tuple(entries), cont, continued)
