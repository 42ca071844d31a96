"""Command line: build, lookup, stats, gen, bench.

Exit codes: 0 success, 1 usage error (bad flags, invalid tree
configuration), 2 data error (unreadable or malformed input).
"""

from __future__ import annotations

import argparse
import csv
import glob
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .binning import PerfectHashError
from .engine import build_ship, footprint, lookup
from .htt import ConfigError, HttBuildError, HttConfig
from .index_io import MAGIC, IndexFormatError, load_index, save_index
from .pls import MAX_GROUPS, choose_bounds, length_histogram
from .prefix import TableError, format_address, load_table, normalize_to_23, parse_address, save_table

log = logging.getLogger("ship")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_k_list(text: str) -> list[int]:
    """``"1..6"`` or ``"1,3,5"`` or ``"2"``."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            ks = list(range(int(lo), int(hi) + 1))
        else:
            ks = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad k list {text!r}") from None
    if not ks or any(not 0 <= k <= MAX_GROUPS for k in ks):
        raise argparse.ArgumentTypeError(f"k values must be in 0..{MAX_GROUPS}")
    return ks


def _add_tree_flags(p: argparse.ArgumentParser, with_k: bool = True):
    if with_k:
        p.add_argument("--k", type=int, default=3, help="number of length groups; 0 = single tree (default 3)")
    p.add_argument("--node-bits", type=int, default=512, help="node size in bits (default 512)")
    p.add_argument("--b", type=int, default=12, help="max prefixes per leaf (default 12)")
    p.add_argument("--merge-threshold", type=int, default=None, help="node merge threshold (default: --b)")
    p.add_argument("--L", dest="array_len", type=int, default=5, help="merge array length per direction (default 5)")
    p.add_argument("--max-stride", type=int, default=10, help="max bits cut per trie node (default 10)")
    p.add_argument("--seed", type=int, default=0, help="hash / sampling seed (default 0)")


def _config(args) -> HttConfig:
    return HttConfig(leaf_threshold_b=args.b, merge_threshold=args.merge_threshold,
                     max_stride_bits=args.max_stride, snm_array_len_L=args.array_len,
                     node_size_bits=args.node_bits)


def _emit(rows, fmt: str, out=None):
    out = out or sys.stdout
    if fmt == "jsonl":
        for r in rows:
            out.write(json.dumps(r) + "\n")
    else:
        w = csv.DictWriter(out, fieldnames=["kind", "key", "value"], lineterminator="\n")
        w.writeheader()
        w.writerows(rows)


def cmd_build(args) -> int:
    if not 0 <= args.k <= MAX_GROUPS:
        raise UsageError(f"--k must be in 0..{MAX_GROUPS}")
    table = load_table(args.table)
    index = build_ship(table, k=args.k, cfg=_config(args), seed=args.seed)
    save_index(index, args.output)
    fp = footprint(index)
    bounds = " ".join(map(str, index.partition.bounds)) if index.partition else "-"
    print(f"prefixes {len(table)}")
    print(f"bins M={fp.n_bins} slots N={fp.n_slots}")
    print(f"bounds {bounds}")
    for key, value in fp.as_dict().items():
        print(f"{key} {value}")
    return EXIT_OK


def cmd_lookup(args) -> int:
    index = load_index(args.index)
    src = sys.stdin if args.addresses in (None, "-") else open(args.addresses, encoding="utf-8")
    bad = 0
    try:
        for lineno, raw in enumerate(src, 1):
            text = raw.strip()
            if not text or text.startswith("#"):
                continue
            try:
                addr = parse_address(text)
            except TableError as exc:
                print(f"line {lineno}: bad address {text!r}: {exc}", file=sys.stderr)
                bad += 1
                continue
            res, stats = lookup(index, addr)
            if res.matched:
                print(f"{format_address(addr)} {res.prefix_length} {res.nhi} {stats.total_accesses}")
            else:
                print(f"{format_address(addr)} MISS")
    finally:
        if src is not sys.stdin:
            src.close()
    return EXIT_DATA if bad else EXIT_OK


def _is_index(path) -> bool:
    with open(path, "rb") as fh:
        return fh.read(len(MAGIC)) == MAGIC


def cmd_stats(args) -> int:
    rows = []
    if _is_index(args.path):
        index = load_index(args.path)
        fp = footprint(index)
        rows.append({"kind": "config", "key": "k", "value": index.k})
        rows.append({"kind": "config", "key": "node_size_bits", "value": index.cfg.node_size_bits})
        if index.partition:
            for i, u in enumerate(index.partition.bounds):
                rows.append({"kind": "bound", "key": i, "value": u})
        groups: dict[int, list[int]] = {}
        for (_, g), h in index.htts.items():
            groups.setdefault(g, []).append(h.n_nodes)
        for g in sorted(groups):
            rows.append({"kind": "group_trees", "key": g, "value": len(groups[g])})
            rows.append({"kind": "group_nodes", "key": g, "value": sum(groups[g])})
    else:
        table = load_table(args.path)
        norm = normalize_to_23(table.entries)
        for length, count in length_histogram(table.entries).items():
            rows.append({"kind": "histogram", "key": length, "value": count})
        if not table.entries:
            _emit(rows, args.format)
            return EXIT_OK
        part = choose_bounds(length_histogram(norm.entries), args.k) if args.k else None
        if part:
            for i, u in enumerate(part.bounds):
                rows.append({"kind": "bound", "key": i, "value": u})
        if args.histogram:
            _emit(rows, args.format)
            return EXIT_OK
        index = build_ship(table, k=args.k, cfg=_config(args), seed=args.seed)
        fp = footprint(index)
    for key, value in fp.as_dict().items():
        rows.append({"kind": "footprint", "key": key, "value": value})
    _emit(rows, args.format)
    return EXIT_OK


def cmd_gen(args) -> int:
    from . import synthgen

    out = Path(args.output)
    if args.kind == "v4":
        out.write_text(synthgen.format_v4(synthgen.gen_v4_table(args.n, args.seed)), encoding="utf-8")
        print(f"{out}")
        return EXIT_OK
    if args.kind == "realstyle":
        tables = [synthgen.gen_realstyle_v6(args.n, args.seed)]
    elif args.kind == "random":
        tables = [synthgen.random_table(args.n, args.seed)]
    else:
        if not args.source:
            raise UsageError("gen map needs --source <ipv4 table>")
        v4 = synthgen.load_v4_table(args.source)
        args.scale = sorted({f for f in args.scale if f != 1.0}, reverse=True)
        spec = synthgen.GenSpec(v4, args.seed, [1.0, *args.scale], args.ext_fraction)
        tables = synthgen.gen_cascade(spec)
    targets = [out]
    if len(tables) > 1:
        targets += [out.with_name(f"{out.stem}_{f:g}{out.suffix}") for f in args.scale]
    for t, path in zip(tables, targets):
        save_table(t, path)
        print(f"{path} {len(t)}")
    return EXIT_OK


def cmd_bench(args) -> int:
    from .bench import run_sweep, write_report

    paths = sorted({p for pattern in args.tables for p in glob.glob(pattern)})
    if not paths:
        raise UsageError(f"no tables match {' '.join(args.tables)}")
    tables = [load_table(p) for p in paths]
    for t, p in zip(tables, paths):
        t.source_label = Path(p).stem
    tables.sort(key=len)
    cfg = _config(args)
    rows = run_sweep(tables, ks=[k for k in args.k if k > 0], cfg=cfg, seed=args.seed,
                     n_validate=args.validate, baseline=not args.no_baseline)
    outputs = write_report(rows, args.out)
    for r in rows:
        print(f"{r.label} k={r.k} worst={r.worst_total_accesses} bytes={r.total_bytes} "
              f"bpb={r.bytes_per_prefix_byte}")
    for p in outputs:
        print(f"wrote {p}")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ship", description="Two-level IPv6 longest-prefix-match index.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("build", help="build an index file from a prefix table")
    p.add_argument("table", help="text table, one '<addr>/<len> <nhi>' per line")
    p.add_argument("-o", "--output", required=True, help="index file to write")
    _add_tree_flags(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("lookup", help="look up addresses in an index file")
    p.add_argument("index")
    p.add_argument("addresses", nargs="?", help="file with one address per line (default: stdin)")
    p.set_defaults(func=cmd_lookup)

    p = sub.add_parser("stats", help="length histogram, group bounds and footprint of a table or index")
    p.add_argument("path", help="prefix table or index file")
    p.add_argument("--histogram", action="store_true", help="tables only: skip the build, print histogram and bounds")
    p.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    _add_tree_flags(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("gen", help="generate synthetic tables")
    p.add_argument("kind", choices=["realstyle", "random", "v4", "map"],
                   help="realstyle/random IPv6 table, an IPv4 table, or map an IPv4 table to IPv6")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--n", type=int, default=25_000, help="table size for realstyle/random/v4")
    p.add_argument("--source", help="IPv4 table for 'map'")
    p.add_argument("--scale", type=float, nargs="*", default=[], help="extra scaled-down copies for 'map'")
    p.add_argument("--ext-fraction", type=float, default=0.3, help="share of mapped prefixes that get extended")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="k sweep with oracle validation; writes CSV and SVG plots")
    p.add_argument("--tables", nargs="+", required=True, help="glob(s) of prefix tables")
    p.add_argument("--k", type=parse_k_list, default=list(range(1, MAX_GROUPS + 1)), help="e.g. 1..6 or 1,2,3")
    p.add_argument("--out", default="report.csv", help="CSV path; plots go next to it")
    p.add_argument("--validate", type=int, default=100_000, help="addresses checked against the oracle per table")
    p.add_argument("--no-baseline", action="store_true", help="skip the single-tree reference rows")
    _add_tree_flags(p, with_k=False)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"ship: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, TableError, IndexFormatError, HttBuildError, PerfectHashError, ValueError) as exc:
        print(f"ship: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
