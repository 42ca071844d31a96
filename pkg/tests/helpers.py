"""Small builders shared by the test modules."""

import random

from ship.prefix import Ipv6Prefix, PrefixTable, parse_prefix


def P(text: str, nhi: int = 0) -> Ipv6Prefix:
    return parse_prefix(text, nhi)


def table(*specs) -> PrefixTable:
    return PrefixTable([P(t, n) for t, n in specs], "test")


def addrs_for(tbl: PrefixTable, n: int, seed: int = 0) -> list[int]:
    """Edges of every prefix plus random in-prefix and uniform addresses."""
    rng = random.Random(seed)
    out = []
    for p in tbl.entries:
        out += [p.value, p.last_address]
    ents = tbl.entries
    for _ in range(n):
        if ents and rng.random() < 0.6:
            p = rng.choice(ents)
            out.append(p.value | (rng.getrandbits(128) & ((1 << (128 - p.length)) - 1)))
        else:
            out.append((0b001 << 125) | rng.getrandbits(125))
    return out
