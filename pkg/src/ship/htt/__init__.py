"""Hybrid trie-tree: density-adaptive trie nodes over reduced D-Tree leaves."""

from .config import ConfigError, HttConfig
from .nodes import EncodeError, LeafEntry, LeafNode, TrieNode, decode_node, encode_node, leaf_capacity
from .region import PartitionDecision, Region, Split, count_partitions, prune_covering
from .snm import SnmLayout, apply_snm, blocks_from_arrays, compute_child_index, locate_child
from .tree import HttBuildError, HttStructure, LeafInfo, build_htt, iter_leaves, lookup_htt, witness_key

__all__ = [
    "ConfigError", "HttConfig", "EncodeError", "LeafEntry", "LeafNode", "TrieNode", "decode_node",
    "encode_node", "leaf_capacity", "PartitionDecision", "Region", "Split", "count_partitions",
    "prune_covering", "SnmLayout", "apply_snm", "blocks_from_arrays", "compute_child_index",
    "locate_child", "HttBuildError", "HttStructure", "LeafInfo", "build_htt", "iter_leaves",
    "lookup_htt", "witness_key",
]
