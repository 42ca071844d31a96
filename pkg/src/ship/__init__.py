"""SHIP: two-level IPv6 longest-prefix-match structure."""

__version__ = "0.1.0"
