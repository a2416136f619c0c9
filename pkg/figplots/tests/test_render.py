import numpy as np
import pytest

from figplots import PanelSpec, RenderError, build_figure, read_series, render_figure

HEADER = "tau,W,Q,mean_n,trace_re,herm_defect"


def _write_series(path, tau, w=None, q=None, header=HEADER):
    ncols = len(header.split(","))
    rows = [header]
    for i, t in enumerate(tau):
        wv = w[i] if w is not None else np.cos(t)
        qv = q[i] if q is not None else 0.1 + 0.01 * t
        rows.append(",".join(f"{v:.17g}" for v in (t, wv, qv, 4.0, 1.0, 0.0)[:ncols]))
    path.write_text("\n".join(rows) + "\n")
    return path


@pytest.fixture
def tau():
    return np.arange(0.0, 2.05, 0.1)


@pytest.fixture
def series_csv(tmp_path, tau):
    return _write_series(tmp_path / "series.csv", tau)


class TestPanelSpec:
    def test_valid(self, series_csv):
        spec = PanelSpec(csv_path=series_csv, panel_label="a", y_column="W")
        assert spec.title() == "(a)"

    def test_title_fragments(self, series_csv):
        spec = PanelSpec(csv_path=series_csv, panel_label="c", y_column="Q",
                         title_fragments=("damped", "drifting"))
        assert spec.title() == "(c) damped drifting"

    @pytest.mark.parametrize("label", ["e", "g", "", "ab"])
    def test_rejects_bad_label(self, series_csv, label):
        with pytest.raises(ValueError, match="panel_label"):
            PanelSpec(csv_path=series_csv, panel_label=label, y_column="W")

    @pytest.mark.parametrize("column", ["w", "mean_n", "tau", ""])
    def test_rejects_bad_column(self, series_csv, column):
        with pytest.raises(ValueError, match="y_column"):
            PanelSpec(csv_path=series_csv, panel_label="a", y_column=column)


class TestReadSeries:
    def test_columns_and_values(self, series_csv, tau):
        table = read_series(series_csv)
        assert set(table) == set(HEADER.split(","))
        np.testing.assert_allclose(table["tau"], tau)
        np.testing.assert_allclose(table["W"], np.cos(tau))

    def test_missing_file(self, tmp_path):
        with pytest.raises(RenderError, match="cannot read"):
            read_series(tmp_path / "absent.csv")

    def test_empty_file(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        with pytest.raises(RenderError, match="empty"):
            read_series(empty)

    def test_header_only_file(self, tmp_path):
        stub = tmp_path / "stub.csv"
        stub.write_text(HEADER + "\n")
        with pytest.raises(RenderError, match="rows"):
            read_series(stub)


class TestBuildFigure:
    def test_empty_panel_list(self):
        with pytest.raises(RenderError, match="no panels"):
            build_figure([])

    def test_missing_column(self, tmp_path, tau):
        truncated = _write_series(tmp_path / "s.csv", tau, header="tau,W")
        spec = PanelSpec(csv_path=truncated, panel_label="a", y_column="Q")
        with pytest.raises(RenderError, match="missing column 'Q'"):
            build_figure([spec])

    def test_mismatched_grids(self, tmp_path, tau, series_csv):
        other = _write_series(tmp_path / "other.csv", tau + 0.5)
        with pytest.raises(RenderError, match="mismatched tau grids"):
            build_figure([
                PanelSpec(csv_path=series_csv, panel_label="a", y_column="W"),
                PanelSpec(csv_path=other, panel_label="b", y_column="W"),
            ])

    def test_mismatched_overlay_grid(self, tmp_path, tau):
        primary = _write_series(tmp_path / "run.csv", tau)
        _write_series(tmp_path / "run_exact.csv", tau[:-2])
        spec = PanelSpec(csv_path=primary, panel_label="a", y_column="W")
        with pytest.raises(RenderError, match="mismatched tau grids"):
            build_figure([spec])

    def test_five_panel_grid(self, tmp_path, tau):
        panels = [
            PanelSpec(csv_path=_write_series(tmp_path / f"{label}.csv", tau),
                      panel_label=label, y_column="W")
            for label in ("a", "b", "c", "d", "f")
        ]
        fig = build_figure(panels)
        visible = [ax for ax in fig.axes if ax.get_visible()]
        hidden = [ax for ax in fig.axes if not ax.get_visible()]
        assert len(visible) == 5
        assert len(hidden) == 1
        assert [ax.get_title()[:3] for ax in visible] == [
            "(a)", "(b)", "(c)", "(d)", "(f)"]
        assert all(ax.get_xlabel() == "scaled time" for ax in visible)

    def test_q_panel_gets_zero_reference(self, series_csv):
        spec = PanelSpec(csv_path=series_csv, panel_label="a", y_column="Q")
        ax = build_figure([spec]).axes[0]
        flat_zero = [line for line in ax.lines
                     if np.allclose(line.get_ydata(), 0.0)]
        assert len(flat_zero) == 1
        assert len(ax.lines) == 2

    def test_w_panel_has_no_reference_line(self, series_csv):
        spec = PanelSpec(csv_path=series_csv, panel_label="a", y_column="W")
        ax = build_figure([spec]).axes[0]
        assert len(ax.lines) == 1

    def test_exact_sibling_overlaid(self, tmp_path, tau):
        primary = _write_series(tmp_path / "series.csv", tau)
        _write_series(tmp_path / "series_exact.csv", tau,
                      w=np.cos(tau) * 0.9)
        spec = PanelSpec(csv_path=primary, panel_label="a", y_column="W")
        ax = build_figure([spec]).axes[0]
        assert len(ax.lines) == 2
        np.testing.assert_allclose(ax.lines[1].get_ydata(), np.cos(tau) * 0.9)

    def test_y_range_applied(self, series_csv):
        spec = PanelSpec(csv_path=series_csv, panel_label="a", y_column="W",
                         y_range=(-2.0, 2.0))
        ax = build_figure([spec]).axes[0]
        assert ax.get_ylim() == (-2.0, 2.0)


class TestRenderFigure:
    def test_writes_png(self, tmp_path, series_csv):
        spec = PanelSpec(csv_path=series_csv, panel_label="a", y_column="W")
        out = render_figure([spec], tmp_path / "fig" / "panel.png")
        data = out.read_bytes()
        assert data[:8] == b"\x89PNG\r\n\x1a\n"

    def test_rerender_is_byte_stable(self, tmp_path, series_csv):
        spec = PanelSpec(csv_path=series_csv, panel_label="a", y_column="W")
        first = render_figure([spec], tmp_path / "one.png").read_bytes()
        second = render_figure([spec], tmp_path / "two.png").read_bytes()
        assert first == second
