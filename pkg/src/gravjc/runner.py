"""Scenario orchestration: engine runs, CSV emission, manifests, comparisons.

Figure presets emit two series per run: the paper-literal spectral engine
with hermitize+renormalize (series.csv, the curve the figures plot) and the
exact engine for reference (series_exact.csv).  An explicit engine choice
narrows the run to that engine.  All numeric output is written with 17
significant digits and \\n line ends; nothing in the output depends on wall
clock or machine, so identical configs give byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np

from . import __version__
from .blocks import BlockedDensity, initial_blocked_density
from .config import ConfigError, RunConfig
from .engines import (
    EngineError,
    EngineMode,
    evolve_blocked,
    evolve_direct,
    snapshot_spectrum,
)
from .observables import (
    ObservableSeries,
    average_blocked,
    mandel_q,
    mean_photon_number,
    photon_distribution,
    population_inversion,
)
from .params import (
    MomentumNode,
    ScaledParams,
    coherent_weights,
    gauss_quadrature_nodes,
    validate_and_scale,
)
from .presets import CAPTION_METADATA, is_figure_preset

SERIES_HEADER = "tau,W,Q,mean_n,trace_re,herm_defect"
PN_HEADER = "tau,n,P"

SPECTRAL_MODES = ("exact_spectral", "paper_spectral", "paper_series")


class ScenarioRunError(EngineError):
    """An engine failed mid-run; carries the diagnostic row count."""

    def __init__(self, engine: EngineMode, tau: float, rows_written: int, cause: Exception):
        self.engine = engine
        self.tau = tau
        self.rows_written = rows_written
        self.cause = cause
        super().__init__(
            f"engine {engine.mode} failed at tau={tau:g} after {rows_written} "
            f"rows: {cause}"
        )


@dataclass(eq=False)
class EngineOutput:
    """One engine's full in-memory result plus its manifest diagnostics."""

    engine: EngineMode
    series: ObservableSeries
    pn: np.ndarray  # (ntau, nphoton) raw distributions
    diagnostics: dict


@dataclass(eq=False)
class RunResult:
    outputs: dict[str, EngineOutput]  # keyed by series file name
    paths: list[Path]
    manifest: dict


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _observable_row(state: BlockedDensity) -> tuple[float, float, float, float, np.ndarray]:
    w = population_inversion(state)
    p = photon_distribution(state)
    q = mandel_q(p)
    mean_n = mean_photon_number(p)
    trace_re = state.trace().real
    return w, q, mean_n, trace_re, p


def compute_engine_output(
    engine: EngineMode,
    scaled: ScaledParams,
    nodes: list[MomentumNode],
    rho0: BlockedDensity,
    quartic_mode: str,
    controls,
    dt: float,
) -> EngineOutput:
    """Evolve one engine over the whole grid and momentum nodes.

    Raises ScenarioRunError on divergence, carrying the number of completed
    rows for the CLI diagnostic.
    """
    grid = scaled.tau_grid
    ntau = grid.shape[0]
    w = np.empty(ntau)
    q = np.empty(ntau)
    mean_n = np.empty(ntau)
    trace_re = np.empty(ntau)
    herm = np.empty(ntau)
    pn = np.empty((ntau, rho0.nblocks + 1))
    trace_raw_re = np.empty(ntau)
    herm_raw = np.empty(ntau)

    trajectories = None
    if engine.mode == "direct_integrator":
        try:
            trajectories = [
                evolve_direct(rho0, scaled, node.p_recoil, grid, dt, quartic_mode)
                for node in nodes
            ]
        except EngineError as exc:
            raise ScenarioRunError(engine, float(grid[0]), 0, exc) from exc

    for i, tau in enumerate(grid):
        tau = float(tau)
        per_node = []
        raw_trace = 0.0
        raw_defect = 0.0
        try:
            for j, node in enumerate(nodes):
                if trajectories is not None:
                    state = trajectories[j][i]
                    diag = {
                        "trace_raw": state.trace(),
                        "herm_defect_raw": state.herm_defect(),
                    }
                else:
                    spectrum = snapshot_spectrum(scaled, node.p_recoil, tau, rho0.nblocks)
                    state, diag = evolve_blocked(
                        rho0, spectrum, engine, scaled.gamma_s, scaled.eta_s,
                        tau, quartic_mode, controls,
                    )
                per_node.append(state)
                raw_trace += node.weight * diag["trace_raw"].real
                raw_defect = max(raw_defect, diag["herm_defect_raw"])
            averaged = average_blocked(per_node, nodes)
            w[i], q[i], mean_n[i], trace_re[i], pn[i] = _observable_row(averaged)
            herm[i] = averaged.herm_defect()
            trace_raw_re[i] = raw_trace
            herm_raw[i] = raw_defect
        except EngineError as exc:
            raise ScenarioRunError(engine, tau, i, exc) from exc

    series = ObservableSeries(
        tau=grid.copy(), w=w, q=q, mean_n=mean_n, trace_re=trace_re, herm_defect=herm
    )
    diagnostics = {
        "trace_raw_re_final": float(trace_raw_re[-1]),
        "trace_raw_re_min": float(trace_raw_re.min()),
        "herm_defect_raw_max": float(herm_raw.max()),
    }
    return EngineOutput(engine=engine, series=series, pn=pn, diagnostics=diagnostics)


def _engine_plan(cfg: RunConfig) -> list[tuple[EngineMode, str, str]]:
    """(engine, series file, pn file) triples for this config."""
    if cfg.engine is not None:
        mode = EngineMode(
            mode=cfg.engine,
            series_variant=cfg.series_variant,
            hermitize=cfg.hermitize,
            renormalize=cfg.renormalize,
        )
        return [(mode, "series.csv", "pn.csv")]
    if is_figure_preset(cfg.preset):
        paper = EngineMode(
            mode="paper_spectral",
            series_variant=cfg.series_variant,
            hermitize=True,
            renormalize=True,
        )
        exact = EngineMode(mode="exact_spectral")
        return [(paper, "series.csv", "pn.csv"), (exact, "series_exact.csv", "pn_exact.csv")]
    default = EngineMode(
        mode="exact_spectral",
        series_variant=cfg.series_variant,
        hermitize=cfg.hermitize,
        renormalize=cfg.renormalize,
    )
    return [(default, "series.csv", "pn.csv")]


def _write_series_csv(path: Path, series: ObservableSeries) -> None:
    lines = [SERIES_HEADER]
    for i in range(series.tau.shape[0]):
        lines.append(
            ",".join(
                _fmt(column[i])
                for column in (
                    series.tau, series.w, series.q,
                    series.mean_n, series.trace_re, series.herm_defect,
                )
            )
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _write_pn_csv(path: Path, tau_grid: np.ndarray, pn: np.ndarray) -> None:
    lines = [PN_HEADER]
    for i, tau in enumerate(tau_grid):
        for n in range(pn.shape[1]):
            lines.append(f"{_fmt(tau)},{n},{_fmt(pn[i, n])}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _json_safe(value):
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.integer):
        return int(value)
    return value


def _manifest(cfg: RunConfig, scaled: ScaledParams, nodes, plan, outputs) -> dict:
    params = {k: _json_safe(v) for k, v in vars(cfg.params).items()}
    manifest = {
        "generator": f"gravjc {__version__}",
        "preset": cfg.preset,
        "physical_params": params,
        "scaled_params": {
            "delta0_s": scaled.delta0_s,
            "omega_c_s": scaled.omega_c_s,
            "doppler_coeff": scaled.doppler_coeff,
            "grav_drift": scaled.grav_drift,
            "gamma_s": scaled.gamma_s,
            "eta_s": scaled.eta_s,
            "tau_start": float(scaled.tau_grid[0]),
            "tau_end": float(scaled.tau_grid[-1]),
            "tau_points": int(scaled.tau_grid.shape[0]),
        },
        "tau_max": cfg.tau_max,
        "tau_step": cfg.tau_step,
        "momentum_nodes": [
            {"p_recoil": node.p_recoil, "weight": node.weight} for node in nodes
        ],
        "dt_integrator": cfg.dt_integrator,
        "emit_pn": cfg.emit_pn,
        "series_controls": {
            "max_terms": cfg.series_controls.max_terms,
            "term_tol": cfg.series_controls.term_tol,
            "exponent_clamp": cfg.series_controls.exponent_clamp,
        },
        "engines": [
            {
                "mode": engine.mode,
                "series_variant": engine.series_variant,
                "hermitize": engine.hermitize,
                "renormalize": engine.renormalize,
                "series_file": series_file,
                "pn_file": pn_file if cfg.emit_pn else None,
                "diagnostics": outputs[series_file].diagnostics,
            }
            for engine, series_file, pn_file in plan
        ],
    }
    if is_figure_preset(cfg.preset):
        manifest["caption_metadata"] = dict(CAPTION_METADATA)
    return manifest


def run_scenario(cfg: RunConfig) -> RunResult:
    """Run the configured engines and write series/pn CSVs plus the manifest."""
    scaled = validate_and_scale(cfg.params, cfg.tau_max, cfg.tau_step)
    nodes = gauss_quadrature_nodes(cfg.params.sigma0_momentum_width, cfg.momentum_nodes)
    weights = coherent_weights(cfg.params.alpha_coherent, cfg.params.fock_cutoff)
    rho0 = initial_blocked_density(weights)
    plan = _engine_plan(cfg)

    outputs: dict[str, EngineOutput] = {}
    for engine, series_file, _pn_file in plan:
        outputs[series_file] = compute_engine_output(
            engine, scaled, nodes, rho0, cfg.params.quartic_rate_mode,
            cfg.series_controls, cfg.dt_integrator,
        )

    out_dir = cfg.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for engine, series_file, pn_file in plan:
        series_path = out_dir / series_file
        _write_series_csv(series_path, outputs[series_file].series)
        paths.append(series_path)
        if cfg.emit_pn:
            pn_path = out_dir / pn_file
            _write_pn_csv(pn_path, scaled.tau_grid, outputs[series_file].pn)
            paths.append(pn_path)

    manifest = _manifest(cfg, scaled, nodes, plan, outputs)
    manifest_path = out_dir / "run_manifest.json"
    manifest_path.write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
        newline="\n",
    )
    paths.append(manifest_path)
    return RunResult(outputs=outputs, paths=paths, manifest=manifest)


def _nan_safe_absdiff(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    both_nan = np.isnan(a) & np.isnan(b)
    return np.where(both_nan, 0.0, np.abs(a - b))


def compare_engines(cfg: RunConfig, engine_names: list[str]) -> tuple[Path, dict]:
    """Cross-validate engines on one config; writes compare.csv.

    Spectral engines evaluate the quasi-static snapshot solution, so
    comparing them to the direct integrator at grav_drift != 0 is refused
    unless cfg.force is set.
    """
    if len(engine_names) < 2:
        raise ConfigError("compare needs at least two engines")
    for name in engine_names:
        if name not in SPECTRAL_MODES + ("direct_integrator",):
            raise ConfigError(f"unknown engine {name!r}")
    if len(set(engine_names)) != len(engine_names):
        raise ConfigError("compare engines must be distinct")

    scaled = validate_and_scale(cfg.params, cfg.tau_max, cfg.tau_step)
    mixes = "direct_integrator" in engine_names and any(
        name in SPECTRAL_MODES for name in engine_names
    )
    if mixes and scaled.grav_drift != 0.0 and not cfg.force:
        raise ConfigError(
            "spectral engines freeze the detuning per output time; comparing "
            "them to direct_integrator needs qg_product = 0 (or --force)"
        )

    nodes = gauss_quadrature_nodes(cfg.params.sigma0_momentum_width, cfg.momentum_nodes)
    weights = coherent_weights(cfg.params.alpha_coherent, cfg.params.fock_cutoff)
    rho0 = initial_blocked_density(weights)

    outputs = {}
    for name in engine_names:
        engine = EngineMode(
            mode=name,
            series_variant=cfg.series_variant,
            hermitize=cfg.hermitize,
            renormalize=cfg.renormalize,
        )
        outputs[name] = compute_engine_output(
            engine, scaled, nodes, rho0, cfg.params.quartic_rate_mode,
            cfg.series_controls, cfg.dt_integrator,
        )

    pairs = list(combinations(engine_names, 2))
    columns = {}
    report = {}
    for a, b in pairs:
        sa, sb = outputs[a].series, outputs[b].series
        dw = _nan_safe_absdiff(sa.w, sb.w)
        dq = _nan_safe_absdiff(sa.q, sb.q)
        dtrace = _nan_safe_absdiff(sa.trace_re, sb.trace_re)
        columns[f"dW_{a}__{b}"] = dw
        columns[f"dQ_{a}__{b}"] = dq
        columns[f"dtrace_{a}__{b}"] = dtrace
        report[f"{a}__{b}"] = {
            "max_dW": float(dw.max()),
            "max_dQ": float(dq.max()),
            "max_dtrace": float(dtrace.max()),
        }

    out_dir = cfg.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "compare.csv"
    header = "tau," + ",".join(columns)
    lines = [header]
    grid = scaled.tau_grid
    for i in range(grid.shape[0]):
        row = [_fmt(grid[i])] + [_fmt(col[i]) for col in columns.values()]
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path, report
