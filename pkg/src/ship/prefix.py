"""Prefix and table model: parsing, canonical form, /23 normalisation, brute-force LPM."""

from __future__ import annotations

import ipaddress
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Optional

log = logging.getLogger(__name__)

ADDR_BITS = 128
ADDR_MASK = (1 << ADDR_BITS) - 1
BIN_BITS = 23
NHI_MAX = 255


class TableError(ValueError):
    """Malformed table input."""


class DuplicatePrefixError(TableError):
    pass


def prefix_mask(length: int) -> int:
    return (ADDR_MASK << (ADDR_BITS - length)) & ADDR_MASK


@dataclass(frozen=True, order=True)
class Ipv6Prefix:
    value: int
    length: int
    nhi: int = 0
    # Pre-expansion length, kept when a short prefix is expanded to /23.
    orig_length: Optional[int] = field(default=None, compare=False)

    def __post_init__(self):
        if not 0 <= self.length <= ADDR_BITS:
            raise ValueError(f"prefix length {self.length} out of range")
        if not 0 <= self.nhi <= NHI_MAX:
            raise ValueError(f"nhi {self.nhi} out of range")
        if self.value & ~prefix_mask(self.length) & ADDR_MASK or self.value >> ADDR_BITS:
            raise ValueError("prefix value has bits set beyond its length")

    @property
    def priority_length(self) -> int:
        """Length used to rank matches (the original length for expanded entries)."""
        return self.length if self.orig_length is None else self.orig_length

    @property
    def last_address(self) -> int:
        return self.value | (~prefix_mask(self.length) & ADDR_MASK)

    def matches(self, addr: int) -> bool:
        return (addr & prefix_mask(self.length)) == self.value

    def key23(self) -> int:
        return self.value >> (ADDR_BITS - BIN_BITS)

    def __str__(self) -> str:
        return f"{ipaddress.IPv6Address(self.value).compressed}/{self.length}"


@dataclass(frozen=True)
class LookupResult:
    matched: bool
    prefix_length: Optional[int] = None
    nhi: Optional[int] = None

    @classmethod
    def miss(cls) -> "LookupResult":
        return cls(False)


MISS = LookupResult(False)


@dataclass
class PrefixTable:
    entries: list[Ipv6Prefix]
    source_label: str = ""

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Ipv6Prefix]:
        return iter(self.entries)

    def prefix_bytes(self) -> int:
        """Storage size of the raw prefixes: sum of ceil(length / 8)."""
        return sum((p.length + 7) // 8 for p in self.entries)


def parse_prefix(text: str, nhi: int = 0) -> Ipv6Prefix:
    """Parse ``addr/len``; host bits beyond the length are zeroed with a warning."""
    addr_s, sep, len_s = text.partition("/")
    if not sep:
        raise TableError(f"missing prefix length in {text!r}")
    try:
        addr = int(ipaddress.IPv6Address(addr_s))
        length = int(len_s)
    except ValueError as exc:
        raise TableError(f"bad prefix {text!r}: {exc}") from None
    if not 0 <= length <= ADDR_BITS:
        raise TableError(f"bad prefix length in {text!r}")
    value = addr & prefix_mask(length)
    if value != addr:
        log.warning("%s: bits beyond /%d zeroed", text, length)
    return Ipv6Prefix(value, length, nhi)


def parse_address(text: str) -> int:
    try:
        return int(ipaddress.IPv6Address(text.strip()))
    except ValueError as exc:
        raise TableError(str(exc)) from None


def format_address(addr: int) -> str:
    return ipaddress.IPv6Address(addr).compressed


def make_table(entries: Iterable[Ipv6Prefix], source_label: str = "") -> PrefixTable:
    """Build a table, rejecting duplicate (value, length) keys."""
    seen: dict[tuple[int, int], Ipv6Prefix] = {}
    for p in entries:
        key = (p.value, p.length)
        if key in seen:
            raise DuplicatePrefixError(f"duplicate prefix {p}")
        seen[key] = p
    return PrefixTable(list(seen.values()), source_label)


def parse_table_lines(lines: Iterable[str], source_label: str = "") -> PrefixTable:
    seen: dict[tuple[int, int], Ipv6Prefix] = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise TableError(f"{source_label}:{lineno}: expected '<addr>/<len> <nhi>'")
        try:
            nhi = int(parts[1], 10)
        except ValueError:
            raise TableError(f"{source_label}:{lineno}: bad nhi {parts[1]!r}") from None
        if not 0 <= nhi <= NHI_MAX:
            raise TableError(f"{source_label}:{lineno}: nhi {nhi} out of range 0-255")
        try:
            p = parse_prefix(parts[0], nhi)
        except TableError as exc:
            raise TableError(f"{source_label}:{lineno}: {exc}") from None
        key = (p.value, p.length)
        if key in seen:
            raise DuplicatePrefixError(f"{source_label}:{lineno}: duplicate prefix {p}")
        seen[key] = p
    return PrefixTable(list(seen.values()), source_label)


def load_table(path) -> PrefixTable:
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        return parse_table_lines(fh, str(path))


def serialize_table(table: PrefixTable) -> str:
    return "".join(f"{p} {p.nhi}\n" for p in table.entries)


def save_table(table: PrefixTable, path) -> None:
    Path(path).write_text(serialize_table(table), encoding="utf-8")


@dataclass
class NormalizedTable:
    """Table with every entry keyed on >= 23 bits.

    ``lazy`` holds the prefixes shorter than the eager-expansion cutoff; each
    stands for 2**(23 - length) /23 entries that are never materialised.
    """

    entries: list[Ipv6Prefix]
    lazy: list[Ipv6Prefix] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries) + sum(1 << (BIN_BITS - p.length) for p in self.lazy)

    def expanded(self) -> list[Ipv6Prefix]:
        """All entries with the lazy covers materialised (dominance applied)."""
        out = {(p.value, p.length): p for p in self.entries}
        for p in sorted(self.lazy, key=lambda q: q.length):
            for e in _expand(p):
                cur = out.get((e.value, e.length))
                if cur is None or cur.priority_length < e.priority_length:
                    out[(e.value, e.length)] = e
        return sorted(out.values())


def _expand(p: Ipv6Prefix) -> Iterator[Ipv6Prefix]:
    step = 1 << (ADDR_BITS - BIN_BITS)
    for i in range(1 << (BIN_BITS - p.length)):
        yield Ipv6Prefix(p.value + i * step, BIN_BITS, p.nhi, p.priority_length)


def normalize_to_23(table: Iterable[Ipv6Prefix], lazy_below: int = 0) -> NormalizedTable:
    """Expand every prefix shorter than /23 into the /23s it covers.

    Expanded entries keep the original length in ``orig_length``. Where an
    expansion lands on an existing /23 key, the entry with the greater
    original length wins, which leaves match semantics unchanged. Prefixes
    shorter than ``lazy_below`` are returned unexpanded in ``lazy``.
    """
    out: dict[tuple[int, int], Ipv6Prefix] = {}
    lazy = []
    for p in table:
        if p.length >= BIN_BITS:
            key = (p.value, p.length)
            cur = out.get(key)
            if cur is None or cur.priority_length < p.priority_length:
                out[key] = p
        elif p.length < lazy_below:
            lazy.append(p)
        else:
            for e in _expand(p):
                key = (e.value, e.length)
                cur = out.get(key)
                if cur is None or cur.priority_length < e.priority_length:
                    out[key] = e
    return NormalizedTable(sorted(out.values()), sorted(lazy))


def oracle_lpm(table: Iterable[Ipv6Prefix], addr: int) -> LookupResult:
    """Linear scan: the matching entry with the greatest (original) length."""
    best = None
    for p in table:
        if (addr & prefix_mask(p.length)) == p.value:
            if best is None or p.priority_length > best.priority_length:
                best = p
    if best is None:
        return MISS
    return LookupResult(True, best.priority_length, best.nhi)


class LengthOracle:
    """Exact-match-per-length LPM reference, independent of the SHIP structure.

    Probes one dict per distinct prefix length, longest first. Used for bulk
    validation where the linear scan of :func:`oracle_lpm` is too slow.
    """

    def __init__(self, table: Iterable[Ipv6Prefix]):
        by_len: dict[int, dict[int, Ipv6Prefix]] = {}
        for p in table:
            d = by_len.setdefault(p.length, {})
            cur = d.get(p.value)
            if cur is None or cur.priority_length < p.priority_length:
                d[p.value] = p
        self._levels = [(ADDR_BITS - n, by_len[n]) for n in sorted(by_len, reverse=True)]
        self._normalized = any(p.orig_length is not None for d in by_len.values() for p in d.values())

    def lookup(self, addr: int) -> LookupResult:
        if self._normalized:
            best = None
            for shift, d in self._levels:
                p = d.get((addr >> shift) << shift)
                if p is not None and (best is None or p.priority_length > best.priority_length):
                    best = p
            if best is None:
                return MISS
            return LookupResult(True, best.priority_length, best.nhi)
        for shift, d in self._levels:
            p = d.get((addr >> shift) << shift)
            if p is not None:
                return LookupResult(True, p.length, p.nhi)
        return MISS
