from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

INDEX_BITS = 10
CUTS_BITS = 4
LEAF_COUNT_BITS = 4
LENGTH_BITS = 8


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class HttConfig:
    leaf_threshold_b: int = 12
    merge_threshold: Optional[int] = None  # defaults to leaf_threshold_b
    max_stride_bits: int = 10
    snm_array_len_L: int = 5
    node_size_bits: int = 512
    nhi_bits: int = 8
    lsr_bits: int = 6
    pointer_bits: int = 16

    def __post_init__(self):
        if self.merge_threshold is None:
            object.__setattr__(self, "merge_threshold", self.leaf_threshold_b)
        if not 1 <= self.leaf_threshold_b < (1 << LEAF_COUNT_BITS):
            raise ConfigError(f"leaf threshold must be in 1..{(1 << LEAF_COUNT_BITS) - 1}")
        if not 1 <= self.max_stride_bits <= INDEX_BITS:
            raise ConfigError(f"max_stride_bits must be in 1..{INDEX_BITS}")
        if self.snm_array_len_L < 1:
            raise ConfigError("snm_array_len_L must be >= 1")
        if self.node_size_bits % 8:
            raise ConfigError("node_size_bits must be a multiple of 8")
        if self.node_size_bits < self.trie_header_bits:
            raise ConfigError(f"node_size_bits must be >= {self.trie_header_bits}")
        # one leaf entry with the widest remainder must fit in a node
        if self.node_size_bits < self.leaf_header_bits + self.max_remainder_bits + LENGTH_BITS + self.nhi_bits:
            raise ConfigError("node_size_bits too small for a leaf entry")

    @property
    def trie_header_bits(self) -> int:
        return 1 + CUTS_BITS + self.pointer_bits + 2 * self.snm_array_len_L * INDEX_BITS

    @property
    def leaf_header_bits(self) -> int:
        return 2 + LEAF_COUNT_BITS + self.lsr_bits + self.pointer_bits

    @property
    def max_remainder_bits(self) -> int:
        return (1 << self.lsr_bits) - 1

    @property
    def node_bytes(self) -> int:
        return self.node_size_bits // 8
