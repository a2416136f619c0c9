import json
import subprocess
import sys

import pytest

from gravjc.cli import main


def _write(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestSimulate:
    def test_preset_run_exit_zero(self, tmp_path, capsys):
        cfg = _write(tmp_path, "preset = fig1a\ntau_max = 1\ntau_step = 0.5\n")
        rc = main(["simulate", "--config", cfg, "--out", str(tmp_path / "out")])
        assert rc == 0
        out = capsys.readouterr().out
        assert "series.csv" in out
        assert (tmp_path / "out" / "series.csv").exists()
        assert (tmp_path / "out" / "run_manifest.json").exists()

    def test_preset_flag_overrides_file(self, tmp_path):
        cfg = _write(tmp_path, "preset = fig1a\ntau_max = 1\ntau_step = 0.5\n")
        rc = main(["simulate", "--config", cfg, "--preset", "fig1d",
                   "--out", str(tmp_path / "out")])
        assert rc == 0
        m = json.loads((tmp_path / "out" / "run_manifest.json").read_text())
        assert m["preset"] == "fig1d"
        assert m["physical_params"]["eta_nonmarkov"] == 5e-5

    def test_engine_flag(self, tmp_path):
        cfg = _write(tmp_path, "preset = fig1a\ntau_max = 1\ntau_step = 0.5\n")
        rc = main(["simulate", "--config", cfg, "--engine", "direct_integrator",
                   "--out", str(tmp_path / "out")])
        assert rc == 0
        m = json.loads((tmp_path / "out" / "run_manifest.json").read_text())
        assert [e["mode"] for e in m["engines"]] == ["direct_integrator"]

    def test_cutoff_and_nodes_flags(self, tmp_path):
        cfg = _write(tmp_path, "preset = fig1a\ntau_max = 1\ntau_step = 0.5\n")
        rc = main(["simulate", "--config", cfg, "--cutoff", "40",
                   "--momentum-nodes", "3", "--out", str(tmp_path / "out")])
        assert rc == 0
        m = json.loads((tmp_path / "out" / "run_manifest.json").read_text())
        assert m["physical_params"]["fock_cutoff"] == 40
        assert len(m["momentum_nodes"]) == 3
        weights = [node["weight"] for node in m["momentum_nodes"]]
        assert sum(weights) == pytest.approx(1.0)

    def test_correction_flags(self, tmp_path):
        cfg = _write(tmp_path, "preset = fig1c\ntau_max = 1\ntau_step = 0.5\n"
                               "engine = paper_spectral\n")
        rc = main(["simulate", "--config", cfg, "--hermitize", "--renormalize",
                   "--out", str(tmp_path / "out")])
        assert rc == 0
        m = json.loads((tmp_path / "out" / "run_manifest.json").read_text())
        assert m["engines"][0]["hermitize"] is True
        assert m["engines"][0]["renormalize"] is True

    def test_series_variant_flag(self, tmp_path):
        cfg = _write(tmp_path, "preset = fig1c\ntau_max = 1\ntau_step = 0.5\n"
                               "engine = paper_spectral\n")
        rc = main(["simulate", "--config", cfg,
                   "--series-variant", "reconstruction_81_86",
                   "--out", str(tmp_path / "out")])
        assert rc == 0
        m = json.loads((tmp_path / "out" / "run_manifest.json").read_text())
        assert m["engines"][0]["series_variant"] == "reconstruction_81_86"

    def test_quartic_rate_mode_flag(self, tmp_path):
        cfg = _write(tmp_path, "preset = fig1d\ntau_max = 1\ntau_step = 0.5\n"
                               "engine = exact_spectral\n")
        rc = main(["simulate", "--config", cfg,
                   "--quartic-rate-mode", "eq12_eta",
                   "--out", str(tmp_path / "out")])
        assert rc == 0
        m = json.loads((tmp_path / "out" / "run_manifest.json").read_text())
        assert m["physical_params"]["quartic_rate_mode"] == "eq12_eta"


class TestExitCodes:
    def test_config_error_unknown_key(self, tmp_path, capsys):
        cfg = _write(tmp_path, "preset = fig1a\nwavelength = 3\n")
        rc = main(["simulate", "--config", cfg])
        assert rc == 2
        assert "configuration error" in capsys.readouterr().err

    def test_config_error_unknown_preset(self, tmp_path, capsys):
        cfg = _write(tmp_path, "preset = fig3a\n")
        rc = main(["simulate", "--config", cfg])
        assert rc == 2
        assert "unknown preset" in capsys.readouterr().err

    def test_config_error_missing_params(self, tmp_path, capsys):
        cfg = _write(tmp_path, "tau_max = 5\n")
        rc = main(["simulate", "--config", cfg])
        assert rc == 2
        assert "missing preset or params" in capsys.readouterr().err

    def test_config_error_invalid_physics(self, tmp_path, capsys):
        cfg = _write(tmp_path, "preset = fig1a\ngamma = -1\n")
        rc = main(["simulate", "--config", cfg])
        assert rc == 2

    def test_runtime_error_divergent_series(self, tmp_path, capsys):
        cfg = _write(tmp_path, "preset = fig1f\nengine = paper_series\n"
                               "series_term_tol = 1e-300\n"
                               "series_max_terms = 50\n")
        rc = main(["simulate", "--config", cfg, "--out", str(tmp_path / "out")])
        assert rc == 1
        err = capsys.readouterr().err
        assert "runtime error" in err
        assert "rows" in err

    def test_missing_config_file(self, tmp_path, capsys):
        rc = main(["simulate", "--config", str(tmp_path / "absent.cfg")])
        assert rc == 2

    def test_bad_engine_choice_rejected(self, tmp_path):
        cfg = _write(tmp_path, "preset = fig1a\n")
        with pytest.raises(SystemExit) as err:
            main(["simulate", "--config", cfg, "--engine", "warp"])
        assert err.value.code == 2


class TestCompare:
    def test_compare_exit_zero(self, tmp_path, capsys):
        cfg = _write(tmp_path, "preset = fig1a\ntau_max = 1\ntau_step = 0.5\n")
        rc = main(["compare", "--config", cfg,
                   "--engines", "exact_spectral,paper_spectral",
                   "--out", str(tmp_path / "out")])
        assert rc == 0
        out = capsys.readouterr().out
        assert "compare.csv" in out
        assert (tmp_path / "out" / "compare.csv").exists()

    def test_compare_three_engines(self, tmp_path):
        cfg = _write(tmp_path, "preset = fig1a\ntau_max = 1\ntau_step = 0.5\n")
        rc = main(["compare", "--config", cfg,
                   "--engines", "exact_spectral,paper_spectral,paper_series",
                   "--out", str(tmp_path / "out")])
        assert rc == 0
        header = (tmp_path / "out" / "compare.csv").read_text().split("\n")[0]
        assert header.count("dW_") == 3

    def test_compare_quasi_static_guard(self, tmp_path, capsys):
        cfg = _write(tmp_path, "preset = fig1b\ntau_max = 1\ntau_step = 0.5\n")
        rc = main(["compare", "--config", cfg,
                   "--engines", "exact_spectral,direct_integrator",
                   "--out", str(tmp_path / "out")])
        assert rc == 2
        assert "force" in capsys.readouterr().err

    def test_compare_force_flag(self, tmp_path):
        cfg = _write(tmp_path, "preset = fig1b\ntau_max = 1\ntau_step = 0.5\n")
        rc = main(["compare", "--config", cfg,
                   "--engines", "exact_spectral,direct_integrator", "--force",
                   "--out", str(tmp_path / "out")])
        assert rc == 0

    def test_compare_bad_engine_list(self, tmp_path, capsys):
        cfg = _write(tmp_path, "preset = fig1a\ntau_max = 1\ntau_step = 0.5\n")
        rc = main(["compare", "--config", cfg, "--engines", "exact_spectral"])
        assert rc == 2


def test_module_entry_point(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("preset = fig1a\ntau_max = 1\ntau_step = 0.5\n")
    proc = subprocess.run(
        [sys.executable, "-m", "gravjc", "simulate", "--config", str(cfg),
         "--out", str(tmp_path / "out")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert (tmp_path / "out" / "series.csv").exists()
