"""Command-line interface.

Subcommands: `simulate` runs the configured engines and writes series/pn
CSVs plus a run manifest; `compare` cross-validates engines on one config
and writes compare.csv.  Exit codes: 0 success, 1 runtime/divergence
failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, parse_config
from .engines import ENGINE_MODES, SERIES_VARIANTS, EngineError
from .params import QUARTIC_RATE_MODES, ParameterError
from .runner import compare_engines, run_scenario

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gravjc",
        description="Phase-damped Jaynes-Cummings simulator for a moving atom "
        "in a gravitational field",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", type=Path, help="key = value configuration file")
        p.add_argument("--out", type=Path, help="output directory")
        p.add_argument("--cutoff", type=int, help="Fock cutoff N")
        p.add_argument("--momentum-nodes", type=int, help="quadrature node count")
        p.add_argument("--series-variant", choices=SERIES_VARIANTS)
        p.add_argument("--quartic-rate-mode", choices=QUARTIC_RATE_MODES)
        p.add_argument("--force", action="store_true",
                       help="allow spectral-vs-direct comparison at qg != 0")

    simulate = sub.add_parser("simulate", help="run engines and emit CSV series")
    add_common(simulate)
    simulate.add_argument("--preset", help="figure preset name, e.g. fig1a")
    simulate.add_argument("--engine", choices=ENGINE_MODES,
                          help="run a single engine instead of the preset pair")
    simulate.add_argument("--hermitize", action="store_true",
                          help="project paper-literal output onto its Hermitian part")
    simulate.add_argument("--renormalize", action="store_true",
                          help="divide paper-literal output by Re(trace)")

    compare = sub.add_parser("compare", help="cross-validate engines on one config")
    add_common(compare)
    compare.add_argument("--engines", required=True,
                         help="comma-separated engine list, e.g. exact_spectral,direct_integrator")
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, str]:
    mapping = {
        "preset": getattr(args, "preset", None),
        "engine": getattr(args, "engine", None),
        "output_dir": args.out,
        "fock_cutoff": args.cutoff,
        "momentum_nodes": args.momentum_nodes,
        "series_variant": args.series_variant,
        "quartic_rate_mode": args.quartic_rate_mode,
    }
    overrides = {key: str(value) for key, value in mapping.items() if value is not None}
    for flag in ("hermitize", "renormalize"):
        if getattr(args, flag, False):
            overrides[flag] = "true"
    if args.force:
        overrides["force"] = "true"
    return overrides


def _load_config(args: argparse.Namespace):
    text = ""
    if args.config is not None:
        try:
            text = args.config.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
    return parse_config(text, _overrides(args))


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        if args.command == "simulate":
            result = run_scenario(cfg)
            for path in result.paths:
                print(path)
            return EXIT_OK
        engines = [name.strip() for name in args.engines.split(",") if name.strip()]
        path, report = compare_engines(cfg, engines)
        print(path)
        for pair, stats in report.items():
            print(
                f"{pair}: max_dW={stats['max_dW']:.3e} "
                f"max_dQ={stats['max_dQ']:.3e} max_dtrace={stats['max_dtrace']:.3e}"
            )
        return EXIT_OK
    except (ConfigError, ParameterError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EngineError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    raise SystemExit(main())
