"""Command line harness.

Subcommands mirror the harness operations::

    fidest sweep     --out reports            # fidelity vs angle, both protocols
    fidest timescale --time-grid 200,...,2000 # error bars vs integration time
    fidest validate  --reps 2000              # Monte-Carlo check of the error bars
    fidest tomo      --k 0,6                  # tomography calibration report
    fidest verify    --k 8 --epsilon 0.1 --delta 0.05

Options may come from a JSON config file (`--config`); command line flags win
over file values.  Each run writes <command>.csv, a JSON sidecar with the full
configuration echo, and (unless --no-plot) a PNG figure alongside.

Exit codes: 0 success, 2 configuration error, 3 estimation failed for lack of
counts.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .counts import NOISE_KINDS
from .estimators import NoCountsError
from .harness import (
    DEFAULT_TIME_GRID,
    ConfigError,
    ExperimentConfig,
    config_from_dict,
    mc_validate,
    run_sweep,
    run_time_scaling,
    run_tomo,
    run_verify,
    validate_config,
    write_csv,
    write_sidecar,
)


def _int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip()]


def _float_list(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part.strip()]


def _add_common_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="JSON config file")
    parser.add_argument("--out", type=Path, default=Path("reports"),
                        help="output directory (default: reports)")
    parser.add_argument("--seed", type=int, help="master seed (64-bit unsigned)")
    parser.add_argument("--k", type=_int_list, metavar="LIST",
                        help="comma-separated k values, theta = k*pi/32")
    parser.add_argument("--time", type=float, help="total integration time in seconds")
    parser.add_argument("--rate", type=float, help="coincidence pair rate per second")
    parser.add_argument("--protocols", metavar="LIST",
                        help="comma-separated subset of LVP,DFE,TOMO")
    parser.add_argument("--reps", type=int, help="replications per cell")
    parser.add_argument("--dfe-count-scale", type=float,
                        help="multiplier on the expected DFE counts")
    parser.add_argument("--noise-kind", choices=NOISE_KINDS)
    parser.add_argument("--noise-parameter", type=float,
                        help="fixed noise parameter (skips calibration)")
    parser.add_argument("--target-fidelity", type=float,
                        help="calibrate the noise to this fidelity at every angle")
    parser.add_argument("--no-plot", action="store_true",
                        help="skip figure rendering")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fidest",
        description="Fidelity estimation experiments for two-qubit states "
                    "under Poissonian photon counting.")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("sweep", "estimate fidelity across the angle grid"),
        ("validate", "compare empirical spread with analytic error bars"),
        ("tomo", "tomography calibration of the prepared states"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_common_options(p)

    p = sub.add_parser("timescale", help="error bars versus integration time")
    _add_common_options(p)
    p.add_argument("--time-grid", type=_float_list, metavar="LIST",
                   default=list(DEFAULT_TIME_GRID),
                   help="comma-separated integration times in seconds")

    p = sub.add_parser("verify", help="sequential pass/fail verification runs")
    _add_common_options(p)
    p.add_argument("--epsilon", type=float, default=0.1,
                   help="infidelity gap of the rejection hypothesis")
    p.add_argument("--delta", type=float, default=0.05,
                   help="acceptable false-accept probability")
    p.add_argument("--n-trials", type=int, help="override the computed plan length")
    p.add_argument("--runs", type=int, default=200, help="independent runner repeats")
    return parser


def _load_config(args: argparse.Namespace) -> ExperimentConfig:
    data: dict = {}
    if args.config is not None:
        try:
            data = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise ConfigError("config", f"cannot read {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"invalid JSON in {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config", "top level must be a mapping")
    config = config_from_dict(data)

    overrides: dict = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.k is not None:
        overrides["k_grid"] = tuple(args.k)
    if args.time is not None:
        overrides["total_time"] = args.time
    if args.rate is not None:
        overrides["pair_rate"] = args.rate
    if args.protocols is not None:
        overrides["protocols"] = tuple(p.strip().upper() for p in args.protocols.split(","))
    if args.reps is not None:
        overrides["replications"] = args.reps
    if args.dfe_count_scale is not None:
        overrides["dfe_count_scale"] = args.dfe_count_scale
    if args.noise_kind is not None:
        overrides["noise_kind"] = args.noise_kind
    # a noise override from the command line replaces the file's noise choice
    if args.noise_parameter is not None:
        overrides["noise_parameter"] = args.noise_parameter
        if args.target_fidelity is None:
            overrides["target_fidelity"] = None
    if args.target_fidelity is not None:
        overrides["target_fidelity"] = args.target_fidelity
        if args.noise_parameter is None:
            overrides["noise_parameter"] = None
    if overrides:
        config = validate_config(replace(config, **overrides))
    return config


def _emit(args, command: str, config: ExperimentConfig, report, columns, rows,
          figure_fn, summary: dict | None = None) -> None:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = write_csv(out_dir / f"{command}.csv", columns, rows)
    outputs = {"csv": csv_path.name}
    if not args.no_plot:
        from . import plots  # deferred: matplotlib import is slow

        figure_path = figure_fn(report, out_dir / f"{command}.png")
        outputs["figure"] = figure_path.name
    sidecar = write_sidecar(out_dir / f"{command}.json", command, config,
                            outputs, summary)
    for path in [csv_path, *([] if args.no_plot else [out_dir / f"{command}.png"]), sidecar]:
        print(f"wrote {path}")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _load_config(args)
        if args.command == "sweep":
            report = run_sweep(config)
            from .plots import sweep_figure
            _emit(args, "sweep", config, report, report.COLUMNS, report.rows,
                  sweep_figure)
        elif args.command == "timescale":
            report = run_time_scaling(config, tuple(args.time_grid))
            from .plots import timescale_figure
            _emit(args, "timescale", config, report, report.COLUMNS, report.rows,
                  timescale_figure,
                  summary={
                      "time_grid": list(report.time_grid),
                      "exponent_by_protocol": report.exponent_by_protocol,
                      "exponent_by_cell": report.exponent_by_cell,
                  })
        elif args.command == "validate":
            report = mc_validate(config)
            from .plots import validate_figure
            worst = max((row.rel_deviation for row in report.rows), default=0.0)
            _emit(args, "validate", config, report, report.COLUMNS, report.rows,
                  validate_figure, summary={"max_rel_deviation": worst})
        elif args.command == "tomo":
            report = run_tomo(config)
            from .plots import tomo_figure
            _emit(args, "tomo", config, report, report.COLUMNS, report.rows,
                  tomo_figure)
        elif args.command == "verify":
            report = run_verify(config, epsilon=args.epsilon, delta=args.delta,
                                n_trials=args.n_trials, runs=args.runs)
            from .plots import verify_figure
            _emit(args, "verify", config, report, report.COLUMNS, [report],
                  verify_figure,
                  summary={
                      "pass_rate": report.pass_rate,
                      "accept_rate": report.accept_rate,
                      "expected_accept_rate": report.expected_accept_rate,
                  })
        else:  # pragma: no cover - argparse enforces the choices
            raise ConfigError("command", f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NoCountsError as exc:
        print(f"estimation failed: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
