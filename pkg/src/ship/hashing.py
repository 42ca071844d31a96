"""Seeded 64-bit integer mixing shared by the perfect hash and the generators."""

M64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(x: int) -> int:
    """splitmix64 finaliser."""
    x = (x + GOLDEN) & M64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & M64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & M64
    return x ^ (x >> 31)


def seeded(x: int, seed: int) -> int:
    return mix64((x ^ ((seed * GOLDEN) & M64)) & M64)
