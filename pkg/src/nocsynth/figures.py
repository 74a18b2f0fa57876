"""Floorplan/topology rendering to SVG (or any matplotlib-supported format).

One figure shows the chip outline, cores colored by cluster, whitespace
grids, switch and NI glyphs, and the opened inter-switch links with width
scaled by carried load.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import Rectangle

matplotlib.rcParams["svg.hashsalt"] = "nocsynth"

_CLUSTER_COLORS = plt.get_cmap("tab10").colors


def cluster_color(k: int):
    return _CLUSTER_COLORS[k % len(_CLUSTER_COLORS)]


def render_floorplan(outcome, path) -> None:
    """Draw one synthesis outcome and save it to ``path``."""
    fp = outcome.floorplan
    part = outcome.partition
    fig, ax = plt.subplots(figsize=(7, 7))

    chip = fp.chip
    ax.add_patch(
        Rectangle((chip.x, chip.y), chip.w, chip.h, fill=False, lw=1.6, ec="black")
    )
    for gr in outcome.grids:
        r = gr.rect
        ax.add_patch(
            Rectangle((r.x, r.y), r.w, r.h, fc="0.94", ec="0.8", lw=0.4, zorder=1)
        )
    for i, r in enumerate(fp.placements):
        color = cluster_color(part.assign[i])
        ax.add_patch(
            Rectangle((r.x, r.y), r.w, r.h, fc=color, alpha=0.45, ec=color, lw=1.2, zorder=2)
        )
        cx, cy = r.center
        ax.text(cx, cy, f"c{i}", ha="center", va="center", fontsize=8, zorder=5)

    sw_centers = outcome.switch_centers()
    max_load = max(outcome.routes.edge_load.values(), default=0.0)
    for (u, v), load in sorted(outcome.routes.edge_load.items()):
        (x1, y1), (x2, y2) = sw_centers[u], sw_centers[v]
        lw = 0.8 + (2.4 * load / max_load if max_load > 0 else 0.0)
        ax.plot([x1, x2], [y1, y2], color="0.25", lw=lw, zorder=3)
    for k, (x, y) in sorted(sw_centers.items()):
        ax.scatter([x], [y], marker="s", s=90, color=cluster_color(k), ec="black", zorder=4)
        ax.text(x, y, f"{k}", ha="center", va="center", fontsize=7, zorder=5)
    for core, (x, y) in sorted(outcome.ni_centers().items()):
        ax.scatter(
            [x], [y], marker="o", s=22,
            color=cluster_color(part.assign[core]), ec="black", lw=0.5, zorder=4,
        )

    ax.set_xlim(chip.x - 0.05 * chip.w, chip.x2 + 0.05 * chip.w)
    ax.set_ylim(chip.y - 0.05 * chip.h, chip.y2 + 0.05 * chip.h)
    ax.set_aspect("equal")
    ax.set_xlabel("mm")
    ax.set_ylabel("mm")
    ax.set_title(
        f"{fp.chip.w:.2f} x {fp.chip.h:.2f} mm, m={outcome.m}, "
        f"{outcome.report.power_mw:.2f} mW, ws {outcome.report.whitespace_pct:.1f}%"
    )
    fig.savefig(path, metadata={"Date": None} if str(path).endswith(".svg") else None)
    plt.close(fig)
