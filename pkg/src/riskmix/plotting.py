"""Optional rendering of sweep CSV output to a PNG figure."""

from __future__ import annotations

import csv
import math
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def plot_sweep(csv_path, png_path, title: str | None = None) -> None:
    """One curve per (mixture kind, engine) pair: bound value against k."""
    series = defaultdict(list)
    with open(csv_path, newline="") as fh:
        for row in csv.DictReader(fh):
            try:
                value = float(row["value"])
            except ValueError:
                continue
            if math.isfinite(value):
                series[(row["kind"], row["engine"])].append((int(row["k"]), value))

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for (kind, engine), pts in sorted(series.items()):
        pts.sort()
        ax.plot([k for k, _ in pts], [v for _, v in pts], marker="o", label=f"{kind}/{engine}")
    ax.set_xlabel("k (matrix power)")
    ax.set_ylabel("bound value")
    if title:
        ax.set_title(title)
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
