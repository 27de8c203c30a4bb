"""Render an assembly layout to a CSV table and matplotlib figures.

Output files land in one directory: layout.csv (the delimited placement
table), meta_profile.png (the merged thickness scale), and overlays.png
(per-sherd profiles drawn at their committed offsets) when the source
profiles are available. Known fixture sherds keep their conventional
colors.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .fixtures import FIXTURE_COLORS
from .profile import ThicknessProfile


def render_report(
    layout: dict, out_dir, profiles: list[ThicknessProfile] | None = None
) -> list[Path]:
    """Write layout.csv and the figures; returns the paths written.

    layout is the document produced by export_layout. profiles, when given,
    supply the per-sherd curves for the overlay figure.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [_write_csv(layout, out_dir / "layout.csv")]
    written.append(_plot_meta(layout, out_dir / "meta_profile.png"))
    if profiles:
        written.append(_plot_overlays(layout, profiles, out_dir / "overlays.png"))
    return written


def _write_csv(layout: dict, path: Path) -> Path:
    with path.open("w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sherd_id", "order", "side", "offset_mm", "score"])
        for entry in sorted(layout["sherds"], key=lambda e: e["order"]):
            writer.writerow(
                [
                    entry["sherd_id"],
                    entry["order"],
                    entry["side"],
                    f"{entry['offset_mm']:.4f}",
                    f"{entry['score']:.4f}",
                ]
            )
    return path


def _plot_meta(layout: dict, path: Path) -> Path:
    meta = layout["meta_profile"]
    step = meta["step_mm"]
    samples = meta["samples_mm"]
    x = [i * step for i in range(len(samples))]
    fig, ax = plt.subplots(figsize=(8, 3))
    ax.plot(x, samples, color="black", lw=1.5)
    ax.set_xlabel("arc position (mm)")
    ax.set_ylabel("thickness (mm)")
    ax.set_title("merged thickness scale")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def _plot_overlays(
    layout: dict, profiles: list[ThicknessProfile], path: Path
) -> Path:
    by_id = {p.sherd_id: p for p in profiles}
    meta = layout["meta_profile"]
    step = meta["step_mm"]
    fig, ax = plt.subplots(figsize=(8, 3.5))
    x_meta = [i * step for i in range(len(meta["samples_mm"]))]
    ax.plot(x_meta, meta["samples_mm"], color="0.8", lw=4, label="meta", zorder=1)
    for entry in sorted(layout["sherds"], key=lambda e: e["order"]):
        prof = by_id.get(entry["sherd_id"])
        if prof is None:
            continue
        x = [entry["offset_mm"] + j * prof.step for j in range(len(prof))]
        ax.plot(
            x,
            prof.samples,
            lw=1.2,
            label=entry["sherd_id"],
            color=FIXTURE_COLORS.get(entry["sherd_id"]),
            zorder=2,
        )
    ax.set_xlabel("arc position (mm)")
    ax.set_ylabel("thickness (mm)")
    ax.set_title("sherd profiles at committed offsets")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8, ncol=3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
