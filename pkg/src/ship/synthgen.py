"""Synthetic prefix tables: IPv4-shaped sources, the IPv4-to-IPv6 mapping, stratified scaling."""

from __future__ import annotations

import ipaddress
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .hashing import seeded
from .prefix import ADDR_BITS, Ipv6Prefix, PrefixTable, TableError, prefix_mask

V4_BITS = 32
V6_TOP_PATTERN = 0x200  # 12 bits, then a 4-bit nibble: 2000::/16 .. 200f::/16

# Rough shape of a global IPv4 table.
V4_LENGTH_WEIGHTS = {
    8: 0.0004, 9: 0.0004, 10: 0.0008, 11: 0.0015, 12: 0.003, 13: 0.006, 14: 0.011, 15: 0.016,
    16: 0.025, 17: 0.012, 18: 0.02, 19: 0.032, 20: 0.045, 21: 0.048, 22: 0.1, 23: 0.09, 24: 0.58,
}

# Rough shape of an IPv6 table as seen from a route collector, circa 2016.
V6_LENGTH_WEIGHTS = {
    20: 0.0006, 22: 0.0006, 24: 0.002, 26: 0.001, 27: 0.001, 28: 0.008, 29: 0.04, 30: 0.004,
    31: 0.003, 32: 0.32, 33: 0.012, 34: 0.01, 35: 0.008, 36: 0.03, 37: 0.004, 38: 0.008,
    39: 0.004, 40: 0.04, 41: 0.008, 42: 0.01, 43: 0.005, 44: 0.05, 45: 0.01, 46: 0.015,
    47: 0.02, 48: 0.36, 52: 0.002, 56: 0.008, 60: 0.002, 64: 0.006,
}
# (base, length, weight): regional registry blocks that allocations are drawn from.
V6_RIR_BLOCKS = [
    (0x2001 << 112, 16, 0.15), (0x2400 << 112, 12, 0.2), (0x2600 << 112, 12, 0.2),
    (0x2800 << 112, 12, 0.08), (0x2a00 << 112, 12, 0.32), (0x2c00 << 112, 12, 0.05),
]
# Provider-independent /23-/29 ranges where many /48 assignments sit side by side.
V6_PI_BLOCKS = [
    (0x2001_0678 << 96, 29), (0x2001_07f8 << 96, 29), (0x2620 << 112, 23), (0x2602_fd00 << 96, 24),
    (0x2a07_0000 << 96, 24), (0x2a0b_0000 << 96, 24), (0x2a0c_0000 << 96, 24), (0x2404_f000 << 96, 24),
]


def _draw_lengths(rng: random.Random, weights: dict[int, float], n: int) -> list[int]:
    lengths = list(weights)
    return sorted(rng.choices(lengths, weights=[weights[x] for x in lengths], k=n))


def _random_under(rng: random.Random, base: int, base_len: int, length: int, bits: int) -> int:
    low = rng.getrandbits(length - base_len) if length > base_len else 0
    return base | (low << (bits - length))


def gen_v4_table(n: int, seed: int = 0, nest_fraction: float = 0.55) -> list[tuple[int, int, int]]:
    """IPv4-like (value, length, nhi) triples with a realistic length mix.

    About ``nest_fraction`` of the prefixes are more-specifics of shorter
    ones already placed, the rest are spread over 1.0.0.0-223.255.255.255.
    """
    rng = random.Random(seed)
    seen = set()
    placed: dict[int, list[int]] = {}
    out = []
    for length in _draw_lengths(rng, V4_LENGTH_WEIGHTS, n):
        for _ in range(64):
            parents = [pl for pl in range(max(8, length - 8), length) if placed.get(pl)]
            if parents and rng.random() < nest_fraction:
                pl = rng.choice(parents)
                value = _random_under(rng, rng.choice(placed[pl]), pl, length, V4_BITS)
            else:
                first = rng.randint(1, 223)
                value = _random_under(rng, first << 24, 8, length, V4_BITS)
            if (value, length) not in seen:
                break
        else:
            continue
        seen.add((value, length))
        placed.setdefault(length, []).append(value)
        out.append((value, length, rng.randrange(256)))
    return out


def parse_v4_lines(lines: Iterable[str], source_label: str = "") -> list[tuple[int, int, int]]:
    out = []
    seen = set()
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            net_s, nhi_s = line.split()
            net = ipaddress.IPv4Network(net_s, strict=False)
            nhi = int(nhi_s)
        except ValueError as exc:
            raise TableError(f"{source_label}:{lineno}: {exc}") from None
        if not 0 <= nhi <= 255:
            raise TableError(f"{source_label}:{lineno}: nhi out of range")
        key = (int(net.network_address), net.prefixlen)
        if key not in seen:
            seen.add(key)
            out.append((*key, nhi))
    return out


def load_v4_table(path) -> list[tuple[int, int, int]]:
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        return parse_v4_lines(fh, str(path))


def format_v4(entries: Iterable[tuple[int, int, int]]) -> str:
    return "".join(f"{ipaddress.IPv4Address(v)}/{l} {nhi}\n" for v, l, nhi in entries)


@dataclass
class GenSpec:
    source: list[tuple[int, int, int]]
    seed: int = 0
    scale_fractions: list[float] = field(default_factory=lambda: [1.0])
    ext_fraction: float = 0.3

    def __post_init__(self):
        if any(not 0 < f <= 1 for f in self.scale_fractions):
            raise ValueError("scale fractions must be in (0, 1]")
        self.scale_fractions = sorted(self.scale_fractions, reverse=True)


def _map_v4(value: int, length: int, seed: int) -> tuple[int, int]:
    nibble = seeded(value, seed) & 0xF
    top = (V6_TOP_PATTERN << 4) | nibble
    return (top << 112) | (value << 80), length + 16


def gen_v6_from_v4(spec: GenSpec) -> PrefixTable:
    """One IPv6 prefix per distinct IPv4 prefix, NHI preserved.

    A v4 (value, l) becomes 200N:<v4 bits>/l+16 where N is a seeded nibble of
    the value. A seeded ``ext_fraction`` of entries gets 0-16 extra random
    low bits to fill the /33-/48 band; an extension that would collide with
    another entry is dropped so the mapping stays one-to-one.
    """
    src = sorted({(v, l): nhi for v, l, nhi in spec.source}.items())
    base = [_map_v4(v, l, spec.seed) for (v, l), _ in src]
    taken = set(base)
    out = []
    for ((v, l), nhi), (value, length) in zip(src, base):
        h = seeded(v * 64 + l, spec.seed ^ 0x5EED)
        if (h & 0xFFFF) < spec.ext_fraction * 0x10000:
            extra = (h >> 16) % 17
            if extra:
                new_len = length + extra
                bits = (h >> 24) & ((1 << extra) - 1)
                cand = (value | (bits << (ADDR_BITS - new_len)), new_len)
                if cand not in taken:
                    taken.discard((value, length))
                    taken.add(cand)
                    value, length = cand
        out.append(Ipv6Prefix(value, length, nhi))
    return PrefixTable(out, f"v6-from-v4(seed={spec.seed})")


def scale_table(table: PrefixTable, fraction: float, seed: int = 0) -> PrefixTable:
    """Stratified sample: each length bucket keeps round(fraction * size) entries."""
    if not 0 < fraction <= 1:
        raise ValueError("fraction must be in (0, 1]")
    by_len: dict[int, list[Ipv6Prefix]] = {}
    for p in table.entries:
        by_len.setdefault(p.length, []).append(p)
    rng = random.Random(seed)
    out = []
    for length in sorted(by_len):
        bucket = sorted(by_len[length])
        keep = math.floor(fraction * len(bucket) + 0.5)
        rng.shuffle(bucket)
        out.extend(bucket[:keep])
    return PrefixTable(sorted(out), f"{table.source_label}*{fraction:g}")


def gen_cascade(spec: GenSpec) -> list[PrefixTable]:
    """The mapped table scaled by each fraction, largest first."""
    full = gen_v6_from_v4(spec)
    return [full if f == 1 else scale_table(full, f, spec.seed) for f in spec.scale_fractions]


def gen_realstyle_v6(n: int, seed: int = 0, alloc_gap: int = 160, pi_gap: int = 32) -> PrefixTable:
    """IPv6 table shaped like a route-collector dump: /32 and /48 peaks, nested more-specifics.

    Registries hand out allocations (/20-/32) in address order, so each
    registry block keeps a cursor that advances by a random gap averaging
    ``alloc_gap`` /32s. /48s go either into a few dense provider-independent
    ranges (also filled in order) or under allocations; other lengths are
    more-specifics of an allocation.
    """
    rng = random.Random(seed)
    lengths = _draw_lengths(rng, V6_LENGTH_WEIGHTS, n)
    seen: set[tuple[int, int]] = set()
    allocs: list[tuple[int, int]] = []
    out = []
    block_w = [w for _, _, w in V6_RIR_BLOCKS]
    cursors = [0] * len(V6_RIR_BLOCKS)
    pi_cursors = [0] * len(V6_PI_BLOCKS)

    def add(value, length):
        if (value, length) in seen:
            return False
        seen.add((value, length))
        out.append(Ipv6Prefix(value, length, rng.randrange(256)))
        return True

    shorts = [x for x in lengths if x <= 32]
    rng.shuffle(shorts)
    for length in shorts:
        size = 1 << (32 - length)  # in /32 units
        for _ in range(32):
            i = rng.choices(range(len(V6_RIR_BLOCKS)), weights=block_w)[0]
            base, blen, _ = V6_RIR_BLOCKS[i]
            room = 1 << (32 - blen)
            # smaller (older) blocks are packed tighter
            gap = max(1, alloc_gap * room >> 20)
            cur = cursors[i] + 1 + int(rng.expovariate(1 / gap))
            cur = -(-cur // size) * size
            if cur + size > room:
                continue
            cursors[i] = cur + size
            value = base | (cur << 96)
            if add(value, length):
                allocs.append((value, length))
                break
    if not allocs:
        allocs.append((0x2001_0db8 << 96, 32))
    for length in [x for x in lengths if x > 32]:
        for _ in range(32):
            if length == 48 and rng.random() < 0.45:
                j = rng.randrange(len(V6_PI_BLOCKS))
                base, blen = V6_PI_BLOCKS[j]
                pi_cursors[j] += 1 + int(rng.expovariate(1 / pi_gap))
                value = base | ((pi_cursors[j] % (1 << (48 - blen))) << 80)
            else:
                base, blen = rng.choice(allocs)
                value = _random_under(rng, base, blen, length, ADDR_BITS)
            if add(value, length):
                break
    return PrefixTable(sorted(out), f"realstyle(n={n},seed={seed})")


def random_table(n: int, seed: int = 0, min_len: int = 8, max_len: int = 64,
                 short_fraction: float = 0.01) -> PrefixTable:
    """Mixed-length random table for property and equivalence checks.

    Lengths are spread over [min_len, max_len], with prefixes shorter than /23
    held to ``short_fraction``; half the longer prefixes nest under earlier ones.
    """
    rng = random.Random(seed)
    seen = set()
    out = []
    roots = [rng.getrandbits(23) << (ADDR_BITS - 23) | (0x2 << 124) for _ in range(max(1, n // 40))]
    while len(out) < n:
        if rng.random() < short_fraction and min_len < 23:
            length = rng.randint(min_len, 22)
            value = rng.getrandbits(length) << (ADDR_BITS - length)
        else:
            length = rng.randint(max(23, min_len), max_len)
            if out and rng.random() < 0.5:
                parent = rng.choice(out)
                value = parent.value | (rng.getrandbits(128) & ~prefix_mask(parent.length))
            else:
                value = rng.choice(roots) | rng.getrandbits(ADDR_BITS - 23)
            value &= prefix_mask(length)
        if (value, length) in seen:
            continue
        seen.add((value, length))
        out.append(Ipv6Prefix(value, length, rng.randrange(256)))
    return PrefixTable(out, f"random(n={n},seed={seed})")


FIXTURE_25K = "realstyle_25k.txt"


def fixture_path(name: str = FIXTURE_25K) -> Path:
    """Path of a table bundled with the package (``gen_realstyle_v6(25000, 0)``)."""
    return Path(__file__).parent / "data" / name
