"""Binary index files.

Layout, all integers little-endian:

    header     magic, format version, k, tree config, prefix counts
    partition  bound count, bounds
    binning    slot count, bin count, hash seed, bucket count,
               displacements (u32), slot -> bin index (u32, all-ones = empty),
               bin keys (u32)
    covers     count, then (value u128, length u8, nhi u8) per short prefix
    trees      count, then per tree: bin u32, group u8, offset u8, node count
               u32, and the node images, each node_size_bits/8 bytes
"""

from __future__ import annotations

import io
import struct
from pathlib import Path
from typing import BinaryIO

from .binning import BinningTable
from .engine import ShipIndex
from .htt import HttConfig, HttStructure
from .pls import PlsPartition
from .prefix import Ipv6Prefix

MAGIC = b"SHIPIDX\0"
FORMAT_VERSION = 1
_EMPTY = 0xFFFFFFFF
_HEADER = struct.Struct("<8sHBBBHBBHBBBII")


class IndexFormatError(ValueError):
    pass


def _u32s(values) -> bytes:
    values = list(values)
    return struct.pack(f"<{len(values)}I", *values)


def dump_index(index: ShipIndex, fh: BinaryIO) -> None:
    cfg = index.cfg
    fh.write(_HEADER.pack(
        MAGIC, FORMAT_VERSION, index.k, index.binning is not None,
        cfg.leaf_threshold_b, cfg.merge_threshold, cfg.max_stride_bits, cfg.snm_array_len_L,
        cfg.node_size_bits, cfg.nhi_bits, cfg.lsr_bits, cfg.pointer_bits,
        index.n_prefixes, index.prefix_bytes))
    bounds = index.partition.bounds if index.partition else ()
    fh.write(struct.pack(f"<B{len(bounds)}B", len(bounds), *bounds))
    bt = index.binning
    if bt is not None:
        fh.write(struct.pack("<IIQI", bt.n_slots, bt.n_bins, bt.seed, bt.n_buckets))
        fh.write(_u32s(bt.displacements))
        fh.write(_u32s(_EMPTY if s is None else s[1] for s in bt.slots))
        fh.write(_u32s(bt.keys))
    fh.write(struct.pack("<I", len(index.lazy)))
    for p in index.lazy:
        fh.write(p.value.to_bytes(16, "little") + bytes((p.length, p.nhi)))
    nb = cfg.node_bytes
    fh.write(struct.pack("<I", len(index.htts)))
    for (b, g), htt in sorted(index.htts.items()):
        fh.write(struct.pack("<IBBI", b, g, htt.offset, htt.n_nodes))
        fh.write(b"".join(img.to_bytes(nb, "little") for img in htt.images))


def dumps_index(index: ShipIndex) -> bytes:
    buf = io.BytesIO()
    dump_index(index, buf)
    return buf.getvalue()


class _Cursor:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise IndexFormatError(f"truncated index file at byte {self.pos}")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def u32s(self, n: int) -> list[int]:
        return list(self.unpack(f"<{n}I")) if n else []


def loads_index(data: bytes) -> ShipIndex:
    cur = _Cursor(data)
    (magic, version, k, has_bins, b, merge, stride, arr_len, node_bits, nhi_bits, lsr_bits,
     ptr_bits, n_prefixes, prefix_bytes) = cur.unpack(_HEADER.format)
    if magic != MAGIC:
        raise IndexFormatError("not an index file (bad magic)")
    if version != FORMAT_VERSION:
        raise IndexFormatError(f"unsupported index format version {version}")
    cfg = HttConfig(b, merge, stride, arr_len, node_bits, nhi_bits, lsr_bits, ptr_bits)
    (n_bounds,) = cur.unpack("<B")
    bounds = cur.unpack(f"<{n_bounds}B")
    partition = PlsPartition(tuple(bounds)) if n_bounds else None
    binning = None
    if has_bins:
        n_slots, n_bins, seed, n_buckets = cur.unpack("<IIQI")
        disp = cur.u32s(n_buckets)
        slot_bins = cur.u32s(n_slots)
        keys = cur.u32s(n_bins)
        slots = []
        for s in slot_bins:
            if s == _EMPTY:
                slots.append(None)
            elif s >= n_bins:
                raise IndexFormatError(f"slot points at bin {s} of {n_bins}")
            else:
                slots.append((keys[s], s))
        binning = BinningTable(n_slots, seed, n_buckets, disp, slots, keys)
    (n_lazy,) = cur.unpack("<I")
    lazy = []
    for _ in range(n_lazy):
        raw = cur.take(18)
        lazy.append(Ipv6Prefix(int.from_bytes(raw[:16], "little"), raw[16], raw[17]))
    nb = cfg.node_bytes
    (n_trees,) = cur.unpack("<I")
    htts = {}
    for _ in range(n_trees):
        bin_idx, group, offset, n_nodes = cur.unpack("<IBBI")
        raw = cur.take(n_nodes * nb)
        images = [int.from_bytes(raw[i:i + nb], "little") for i in range(0, len(raw), nb)]
        htts[(bin_idx, group)] = HttStructure(images, cfg, offset)
    if cur.pos != len(data):
        raise IndexFormatError(f"{len(data) - cur.pos} trailing bytes after index")
    return ShipIndex(k, cfg, partition, binning, htts, lazy, n_prefixes, prefix_bytes)


def save_index(index: ShipIndex, path) -> None:
    Path(path).write_bytes(dumps_index(index))


def load_index(path) -> ShipIndex:
    return loads_index(Path(path).read_bytes())
