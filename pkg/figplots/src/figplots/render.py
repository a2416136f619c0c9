"""Multi-panel rendering of simulation series CSVs.

Reads the series CSV schema (header tau,W,Q,mean_n,trace_re,herm_defect)
and lays the requested column out as a labeled panel grid.  Rendering is
read-only and deterministic: fixed canvas geometry, fixed dpi, fixed
metadata, so identical inputs give identical image bytes.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import numpy as np
from matplotlib import pyplot as plt

PANEL_LABELS = ("a", "b", "c", "d", "f")
Y_COLUMNS = ("W", "Q")

_DPI = 150
_METADATA = {"Software": "figplots"}


class RenderError(ValueError):
    """Unusable panel inputs: empty set, bad CSV, or mismatched grids."""


@dataclass(frozen=True)
class PanelSpec:
    """One panel: a series CSV, its grid label, and the column to plot."""

    csv_path: Path
    panel_label: str
    y_column: str
    y_range: tuple[float, float] | None = None
    title_fragments: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "csv_path", Path(self.csv_path))
        if self.panel_label not in PANEL_LABELS:
            raise ValueError(
                f"panel_label must be one of {PANEL_LABELS}, got {self.panel_label!r}"
            )
        if self.y_column not in Y_COLUMNS:
            raise ValueError(
                f"y_column must be one of {Y_COLUMNS}, got {self.y_column!r}"
            )

    def title(self) -> str:
        head = f"({self.panel_label})"
        if self.title_fragments:
            return head + " " + " ".join(self.title_fragments)
        return head


def read_series(path: Path) -> dict[str, np.ndarray]:
    """Column name -> float array for one series CSV."""
    path = Path(path)
    try:
        with path.open(newline="") as handle:
            reader = csv.reader(handle)
            header = next(reader, None)
            has_rows = any(row for row in reader)
    except OSError as exc:
        raise RenderError(f"cannot read {path}: {exc}") from None
    if not header:
        raise RenderError(f"{path} is empty")
    if not has_rows:
        raise RenderError(f"{path} has no data rows")
    data = np.genfromtxt(path, delimiter=",", skip_header=1, ndmin=2)
    if data.shape[1] != len(header):
        raise RenderError(f"{path} rows do not match its header")
    return {name: data[:, i] for i, name in enumerate(header)}


def _exact_sibling(path: Path) -> Path:
    return path.with_name(path.stem + "_exact" + path.suffix)


def _column(table: dict[str, np.ndarray], name: str, path: Path) -> np.ndarray:
    if name not in table:
        raise RenderError(f"{path}: missing column {name!r}")
    return table[name]


def build_figure(panels: list[PanelSpec]):
    """Assemble the panel grid as a matplotlib Figure (not yet saved)."""
    if not panels:
        raise RenderError("no panels to render")

    loaded = []
    tau_ref = None
    ref_path = None
    for spec in panels:
        table = read_series(spec.csv_path)
        tau = _column(table, "tau", spec.csv_path)
        y = _column(table, spec.y_column, spec.csv_path)
        if tau_ref is None:
            tau_ref, ref_path = tau, spec.csv_path
        elif not np.array_equal(tau, tau_ref):
            raise RenderError(
                f"mismatched tau grids: {spec.csv_path} vs {ref_path}"
            )
        exact = None
        sibling = _exact_sibling(spec.csv_path)
        if sibling.exists():
            exact_table = read_series(sibling)
            exact_tau = _column(exact_table, "tau", sibling)
            if not np.array_equal(exact_tau, tau_ref):
                raise RenderError(
                    f"mismatched tau grids: {sibling} vs {ref_path}"
                )
            exact = _column(exact_table, spec.y_column, sibling)
        loaded.append((spec, tau, y, exact))

    ncols = 2
    nrows = math.ceil(len(panels) / ncols)
    fig, axes = plt.subplots(
        nrows, ncols, figsize=(4.5 * ncols, 3.0 * nrows), dpi=_DPI
    )
    axes = np.atleast_1d(axes).ravel()
    for ax in axes[len(panels):]:
        ax.set_visible(False)

    for ax, (spec, tau, y, exact) in zip(axes, loaded):
        if spec.y_column == "Q":
            # Poissonian reference
            ax.axhline(0.0, color="0.6", linewidth=0.8)
        ax.plot(tau, y, color="C0", linewidth=1.0, label=spec.y_column)
        if exact is not None:
            ax.plot(tau, exact, color="C1", linewidth=0.9, linestyle="--",
                    label="exact")
        ax.set_title(spec.title(), fontsize=10)
        ax.set_xlabel("scaled time")
        ax.set_ylabel(spec.y_column)
        if spec.y_range is not None:
            ax.set_ylim(*spec.y_range)
        if exact is not None and spec is loaded[0][0]:
            ax.legend(fontsize=8, loc="upper right")

    fig.tight_layout()
    return fig


def render_figure(panels: list[PanelSpec], out_path: Path) -> Path:
    """Render the panel grid to a raster image file."""
    fig = build_figure(panels)
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    try:
        fig.savefig(out_path, dpi=_DPI, metadata=_METADATA)
    finally:
        plt.close(fig)
    return out_path
