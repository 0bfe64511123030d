"""Render trajectory diagnostics to image files.

Figures mirror the quantities in the CSV: distance to the optimum, the
second-momentum norm ||v||_2, and the max per-coordinate effective learning
rate, each against the step counter. Rendering is headless (Agg); files are
written next to the delimited output, never shown interactively.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .harness import TrajectoryRecord  # noqa: E402


def _series(record: TrajectoryRecord, attr: str):
    ts, values = [], []
    for row in record.rows:
        value = getattr(row, attr)
        if value is not None:
            ts.append(row.t)
            values.append(value)
    return ts, values


_PANELS = (
    ("dist_to_opt", "distance to optimum", True),
    ("v_norm", "||v||2", True),
    ("max_eff_lr", "max effective LR", True),
)


def plot_trajectory(record: TrajectoryRecord, path: str | Path) -> Path:
    """Three-panel diagnostic figure for a single run."""
    return plot_comparison({record.optimizer: record}, path)


def plot_comparison(
    records: Mapping[str, TrajectoryRecord],
    path: str | Path,
    radius: float | None = None,
) -> Path:
    """Overlayed diagnostics for one or more runs sharing an objective.

    ``radius`` draws the basin edge on the distance panel when given.
    """
    fig, axes = plt.subplots(1, len(_PANELS), figsize=(4.2 * len(_PANELS), 3.4))
    for ax, (attr, label, log_scale) in zip(axes, _PANELS):
        for name, record in records.items():
            ts, values = _series(record, attr)
            if ts:
                ax.plot(ts, values, label=name, linewidth=1.0)
        if attr == "dist_to_opt" and radius is not None:
            ax.axhline(radius, color="gray", linestyle="--", linewidth=0.8)
        if log_scale:
            ax.set_yscale("log")
        ax.set_xlabel("step")
        ax.set_ylabel(label)
        ax.legend(fontsize=8)
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out
