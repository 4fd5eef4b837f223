"""Render sweep CSV artifacts into fixed-scale heatmap panels.

The renderer is a pure function of the CSV contents: no numbers are
computed here beyond colormap binning, and re-rendering the same file
produces byte-identical output.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

CSV_COLUMNS = ["axis1", "axis2", "s_max", "s_min", "delta_s",
               "theta1_star", "evals"]

AXIS_LABELS = {
    "phi-theta": (r"$\varphi_1$", r"$\theta_2$"),
    "phi-phi": (r"$\varphi_1$", r"$\varphi_2$"),
}


class PlotError(Exception):
    """Raised for malformed or incomplete CSV grids."""


@dataclass
class PlotSpec:
    csv_path: str
    mode: str = "phi-theta"
    out_path: str = "panels.png"
    panels: tuple[str, ...] = ("s_max", "delta_s")
    dpi: int = 150
    vmin: float = 0.0
    vmax: float = 1.0
    cmap: str = "viridis"
    title: str | None = None

    def __post_init__(self):
        if self.mode not in AXIS_LABELS:
            raise PlotError(f"unknown mode {self.mode!r}")
        bad = [p for p in self.panels if p not in CSV_COLUMNS[2:6]]
        if bad:
            raise PlotError(f"unknown panel columns {bad}")


def read_rows(csv_path: str) -> list[dict]:
    with open(csv_path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_COLUMNS:
            raise PlotError(
                f"unexpected CSV header {reader.fieldnames}; "
                f"expected {CSV_COLUMNS}"
            )
        rows = []
        for raw in reader:
            rows.append({k: float(raw[k]) for k in CSV_COLUMNS})
    if not rows:
        raise PlotError(f"no data rows in {csv_path}")
    return rows


def grid_from_rows(rows: list[dict], column: str
                   ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pivot rows into (axis1 values, axis2 values, value grid).

    Raises PlotError with an explicit report when grid cells are missing.
    """
    a1 = np.array(sorted({r["axis1"] for r in rows}))
    a2 = np.array(sorted({r["axis2"] for r in rows}))
    grid = np.full((len(a2), len(a1)), np.nan)
    i1 = {v: k for k, v in enumerate(a1)}
    i2 = {v: k for k, v in enumerate(a2)}
    for r in rows:
        grid[i2[r["axis2"]], i1[r["axis1"]]] = r[column]
    missing = np.argwhere(np.isnan(grid))
    if len(missing):
        cells = ", ".join(
            f"(axis1={a1[j]:.6g}, axis2={a2[i]:.6g})" for i, j in missing[:20]
        )
        more = "" if len(missing) <= 20 else f" and {len(missing) - 20} more"
        raise PlotError(
            f"incomplete grid: {len(missing)} of {grid.size} cells missing "
            f"for column {column!r}: {cells}{more}"
        )
    return a1, a2, grid


def _pi_ticks(lo: float, hi: float) -> tuple[list[float], list[str]]:
    """Tick positions at multiples of pi/2 with pi-fraction labels."""
    k_lo = int(np.ceil(lo / (np.pi / 2) - 1e-9))
    k_hi = int(np.floor(hi / (np.pi / 2) + 1e-9))
    ticks, labels = [], []
    names = {0: "0", 1: r"$\pi/2$", 2: r"$\pi$", 3: r"$3\pi/2$",
             4: r"$2\pi$"}
    for k in range(k_lo, k_hi + 1):
        ticks.append(k * np.pi / 2)
        labels.append(names.get(k, rf"${k}\pi/2$"))
    return ticks, labels


PANEL_TITLES = {
    "s_max": r"$S_{\max}$ [bits]",
    "s_min": r"$S_{\min}$ [bits]",
    "delta_s": r"$\Delta S$ [bits]",
    "theta1_star": r"$\theta_1^\ast$",
}


def render_heatmap(spec: PlotSpec) -> str:
    """Render the requested panels side by side; returns the output path."""
    rows = read_rows(spec.csv_path)
    xlabel, ylabel = AXIS_LABELS[spec.mode]
    n = len(spec.panels)
    fig, axes = plt.subplots(1, n, figsize=(4.2 * n, 3.6), squeeze=False)
    for ax, column in zip(axes[0], spec.panels):
        a1, a2, grid = grid_from_rows(rows, column)
        im = ax.pcolormesh(a1, a2, grid, cmap=spec.cmap,
                           vmin=spec.vmin, vmax=spec.vmax, shading="nearest")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.set_title(PANEL_TITLES.get(column, column))
        for setter, lim in ((ax.set_xticks, (a1.min(), a1.max())),
                            (ax.set_yticks, (a2.min(), a2.max()))):
            ticks, labels = _pi_ticks(*lim)
            setter(ticks, labels)
        fig.colorbar(im, ax=ax)
    if spec.title:
        fig.suptitle(spec.title)
    fig.tight_layout()
    # strip the software tag so identical CSVs give identical bytes
    fig.savefig(spec.out_path, dpi=spec.dpi, metadata={"Software": None})
    plt.close(fig)
    return spec.out_path
