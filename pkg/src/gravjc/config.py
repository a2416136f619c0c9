"""Run configuration: `key = value` text format and its resolution rules.

Lines hold one `key = value` pair each; `#` starts a comment.  A `preset`
key expands first, then the remaining keys override it, so explicit values
always win.  CLI flags are merged as overrides of the file keys before
resolution.  All errors carry the offending line number and belong to the
exit-code-2 class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .engines import ENGINE_MODES, SERIES_VARIANTS, SeriesControls
from .params import QUARTIC_RATE_MODES, PhysicalParams
from .presets import preset_names, preset_params


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration (exit code 2)."""


@dataclass
class RunConfig:
    """Fully resolved run description handed to the runner."""

    params: PhysicalParams
    engine: str | None = None
    series_variant: str = "definitions_18_20"
    hermitize: bool = False
    renormalize: bool = False
    tau_max: float = 50.0
    tau_step: float = 0.05
    momentum_nodes: int = 1
    dt_integrator: float = 1e-3
    output_dir: Path = field(default_factory=lambda: Path("."))
    emit_pn: bool = False
    preset: str | None = None
    force: bool = False
    series_controls: SeriesControls = field(default_factory=SeriesControls)


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"expected a finite number, got {text!r}")
    return value


def _parse_complex(text: str) -> complex:
    value = complex(text.replace(" ", ""))
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise ValueError(f"expected a finite complex number, got {text!r}")
    return value


def _parse_int(text: str) -> int:
    return int(text, 10)


def _choice(options: tuple[str, ...]):
    def parse(text: str) -> str:
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}; got {text!r}")
        return text

    return parse


# key -> (destination, field name, parser); destinations: params | run | series
_KEY_TABLE = {
    "lambda_coupling": ("params", "lambda_coupling", _parse_float),
    "delta0": ("params", "delta0", _parse_float),
    "alpha": ("params", "alpha_coherent", _parse_complex),
    "alpha_coherent": ("params", "alpha_coherent", _parse_complex),
    "omega_c_scaled": ("params", "omega_c_scaled", _parse_float),
    "q_wavenumber": ("params", "q_wavenumber", _parse_float),
    "atom_mass": ("params", "atom_mass", _parse_float),
    "gravity": ("params", "gravity", _parse_float),
    "qg_product": ("params", "qg_product", _parse_float),
    "omega_recoil": ("params", "omega_recoil", _parse_float),
    "gamma": ("params", "gamma_damping", _parse_float),
    "gamma_damping": ("params", "gamma_damping", _parse_float),
    "eta": ("params", "eta_nonmarkov", _parse_float),
    "eta_nonmarkov": ("params", "eta_nonmarkov", _parse_float),
    "sigma0": ("params", "sigma0_momentum_width", _parse_float),
    "sigma0_momentum_width": ("params", "sigma0_momentum_width", _parse_float),
    "fock_cutoff": ("params", "fock_cutoff", _parse_int),
    "quartic_rate_mode": ("params", "quartic_rate_mode", _choice(QUARTIC_RATE_MODES)),
    "allow_truncation_tail": ("params", "allow_truncation_tail", _parse_bool),
    "engine": ("run", "engine", _choice(ENGINE_MODES)),
    "series_variant": ("run", "series_variant", _choice(SERIES_VARIANTS)),
    "hermitize": ("run", "hermitize", _parse_bool),
    "renormalize": ("run", "renormalize", _parse_bool),
    "tau_max": ("run", "tau_max", _parse_float),
    "tau_step": ("run", "tau_step", _parse_float),
    "momentum_nodes": ("run", "momentum_nodes", _parse_int),
    "dt_integrator": ("run", "dt_integrator", _parse_float),
    "output_dir": ("run", "output_dir", str),
    "emit_pn": ("run", "emit_pn", _parse_bool),
    "force": ("run", "force", _parse_bool),
    "series_max_terms": ("series", "max_terms", _parse_int),
    "series_term_tol": ("series", "term_tol", _parse_float),
    "exponent_clamp": ("series", "exponent_clamp", _parse_float),
}

_REQUIRED_PARAMS = ("lambda_coupling", "delta0", "alpha_coherent")


def _scan_pairs(text: str) -> dict[str, tuple[str, int]]:
    """key -> (raw value, line number), rejecting unknown and duplicate keys."""
    pairs: dict[str, tuple[str, int]] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw_line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw_line!r}")
        if key != "preset" and key not in _KEY_TABLE:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in pairs:
            raise ConfigError(
                f"line {lineno}: duplicate key {key!r} (first set on line {pairs[key][1]})"
            )
        pairs[key] = (value, lineno)
    return pairs


def parse_config(text: str, overrides: dict[str, str] | None = None) -> RunConfig:
    """Parse config text, merge CLI overrides, expand preset, build RunConfig."""
    pairs = _scan_pairs(text)
    for key, value in (overrides or {}).items():
        if key != "preset" and key not in _KEY_TABLE:
            raise ConfigError(f"override: unknown key {key!r}")
        pairs[key] = (str(value), 0)  # line 0 marks a CLI override

    preset = None
    if "preset" in pairs:
        name, lineno = pairs.pop("preset")
        if name not in preset_names():
            where = f"line {lineno}: " if lineno else ""
            raise ConfigError(
                f"{where}unknown preset {name!r}; available: {', '.join(preset_names())}"
            )
        preset = name

    params_kwargs = preset_params(preset) if preset else {}
    run_kwargs: dict = {}
    series_kwargs: dict = {}
    for key, (value, lineno) in pairs.items():
        dest, field_name, parser = _KEY_TABLE[key]
        try:
            parsed = parser(value)
        except ValueError as exc:
            where = f"line {lineno}: " if lineno else ""
            raise ConfigError(f"{where}bad value for {key!r}: {exc}") from None
        if dest == "params":
            params_kwargs[field_name] = parsed
        elif dest == "run":
            run_kwargs[field_name] = parsed
        else:
            series_kwargs[field_name] = parsed

    missing = [name for name in _REQUIRED_PARAMS if name not in params_kwargs]
    if missing:
        raise ConfigError(f"missing preset or params: {', '.join(missing)} not set")

    if "output_dir" in run_kwargs:
        run_kwargs["output_dir"] = Path(run_kwargs["output_dir"])
    if series_kwargs:
        try:
            run_kwargs["series_controls"] = SeriesControls(**series_kwargs)
        except ValueError as exc:
            raise ConfigError(f"bad series controls: {exc}") from None
    try:
        params = PhysicalParams(**params_kwargs)
    except TypeError as exc:
        raise ConfigError(f"bad parameter set: {exc}") from None
    return RunConfig(params=params, preset=preset, **run_kwargs)
