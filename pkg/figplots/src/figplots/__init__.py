"""Multi-panel figure rendering for simulation series CSVs."""

__version__ = "0.1.0"

from .render import (
    PANEL_LABELS,
    Y_COLUMNS,
    PanelSpec,
    RenderError,
    build_figure,
    read_series,
    render_figure,
)

__all__ = [
    "PANEL_LABELS",
    "Y_COLUMNS",
    "PanelSpec",
    "RenderError",
    "build_figure",
    "read_series",
    "render_figure",
]
