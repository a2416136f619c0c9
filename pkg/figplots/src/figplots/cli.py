"""Command line entry point: figplots plot."""

from __future__ import annotations

import argparse
import sys

from .render import PANEL_LABELS, Y_COLUMNS, PanelSpec, RenderError, render_figure


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figplots", description="Render panel grids from series CSVs."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    plot = sub.add_parser("plot", help="render one multi-panel figure")
    plot.add_argument("--series", nargs="+", required=True,
                      help="series CSV paths, one per panel")
    plot.add_argument("--column", choices=Y_COLUMNS, required=True,
                      help="column to plot in every panel")
    plot.add_argument("--labels", required=True,
                      help=f"comma-separated panel labels from {PANEL_LABELS}")
    plot.add_argument("--out", required=True, help="output image path")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    labels = [part.strip() for part in args.labels.split(",")]
    if len(labels) != len(args.series):
        print(
            f"error: {len(args.series)} series but {len(labels)} labels",
            file=sys.stderr,
        )
        return 2
    try:
        panels = [
            PanelSpec(csv_path=path, panel_label=label, y_column=args.column)
            for path, label in zip(args.series, labels)
        ]
        out = render_figure(panels, args.out)
    except (RenderError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
