"""SVG figures for benchmark reports."""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

RC = {
    "svg.hashsalt": "ship",  # stable element ids so reruns give identical files
    "savefig.bbox": "tight",
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
}


def _series(rows, metric):
    by_k = defaultdict(list)
    for r in rows:
        by_k[r["k"]].append((r["n_prefixes"], r[metric]))
    return {k: sorted(v) for k, v in sorted(by_k.items())}


def _label(k: int) -> str:
    return "single tree" if k == 0 else f"k={k}"


def plot_metric(rows, metric: str, ylabel: str, path, logx: bool = False,
                title: str = "") -> Path:
    path = Path(path)
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(5, 3.4))
        for k, pts in _series(rows, metric).items():
            xs, ys = zip(*pts)
            ax.plot(xs, ys, marker="o", ms=3, lw=1.2, ls="--" if k == 0 else "-", label=_label(k))
        if logx:
            ax.set_xscale("log")
        ax.set_xlabel("prefixes in table")
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        ax.legend(fontsize=7, ncol=2)
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path


def report_plots(rows, outdir, stem: str = "report") -> list[Path]:
    """Worst-case accesses (log-x) and total bytes against table size."""
    rows = list(rows)
    if not rows:
        raise ValueError("cannot plot an empty report")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    return [
        plot_metric(rows, "worst_total_accesses", "worst-case memory accesses",
                    outdir / f"{stem}_accesses.svg", logx=True),
        plot_metric(rows, "total_bytes", "structure size (bytes)", outdir / f"{stem}_bytes.svg"),
    ]
