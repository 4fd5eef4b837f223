"""Heatmap rendering for entanglement sweep CSV artifacts."""

from .render import PlotError, PlotSpec, grid_from_rows, read_rows, render_heatmap

__all__ = [
    "PlotError",
    "PlotSpec",
    "grid_from_rows",
    "read_rows",
    "render_heatmap",
]
