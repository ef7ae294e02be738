"""Figures for the reproduction commands, rendered off-screen with matplotlib."""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .enumeration import CENSUS_ROWS  # noqa: E402

__all__ = ["census_figure", "verdicts_figure"]


def census_figure(table: Mapping[int, Mapping[str, int]], path: str | Path) -> Path:
    """Log-scale counts per census row against lattice size."""
    path = Path(path)
    sizes = sorted(table)
    fig, ax = plt.subplots(figsize=(6, 4))
    for row in CENSUS_ROWS:
        pts = [(n, table[n][row.key]) for n in sizes if table[n][row.key] > 0]
        if pts:
            ax.plot(*zip(*pts), marker="o", label=row.title)
    ax.set_yscale("log")
    ax.set_xticks(sizes)
    ax.set_xlabel("n (elements)")
    ax.set_ylabel("count up to isomorphism")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def verdicts_figure(rows: Sequence[Mapping], path: str | Path) -> Path:
    """One cell per corpus entry: expected vs computed, grouped by logic."""
    path = Path(path)
    logics = sorted({r["logic"] for r in rows}, key="FOJC".index)
    fig, ax = plt.subplots(figsize=(7, 0.6 + 0.5 * len(logics)))
    for y, lg in enumerate(logics):
        mine = [r for r in rows if r["logic"] == lg]
        for x, r in enumerate(mine):
            colour = ("tab:green" if r["got"] else "tab:blue") if r["ok"] else "tab:red"
            ax.add_patch(plt.Rectangle((x, y), 0.9, 0.8, color=colour))
    width = max((sum(1 for r in rows if r["logic"] == lg) for lg in logics), default=1)
    ax.set_xlim(0, width)
    ax.set_ylim(0, len(logics))
    ax.set_yticks([i + 0.4 for i in range(len(logics))])
    ax.set_yticklabels(logics)
    ax.set_xticks([])
    ok = sum(r["ok"] for r in rows)
    ax.set_title(f"{ok}/{len(rows)} verdicts match (green: derivable, blue: not, red: mismatch)",
                 fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
