"""Deterministic matplotlib setup.

The Agg backend is forced before pyplot loads, SVG element ids are salted
with a fixed string instead of the process-random default, and the date
metadata is dropped at save time, so re-rendering identical inputs yields an
identical file.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg", force=True)

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

RC = {
    "svg.hashsalt": "ecl-figures",
    "svg.fonttype": "none",
    "path.simplify": False,
    "figure.dpi": 100,
    "savefig.dpi": 100,
    "font.family": "DejaVu Sans",
    "font.size": 10.0,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.axisbelow": True,
    "legend.framealpha": 0.9,
}

REGIME_COLORS = {
    "Adaptive": "#3a7d44",
    "Metastable": "#e0a437",
    "Collapsed": "#b0413e",
}

SHOCK_COLOR = "#e0a437"


def save(fig, path: str) -> None:
    """Write the figure without volatile metadata and release it."""
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    kwargs = {}
    if path.lower().endswith(".svg"):
        kwargs["metadata"] = {"Date": None}
    fig.savefig(path, **kwargs)
    plt.close(fig)
