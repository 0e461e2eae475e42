"""Command-line entry point ``pvdispatch``.

Exit codes: 0 success, 1 usage error, 2 data/config error, 3 internal or
numerical error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .config import CONTROLLER_NAMES, ConfigError, RunConfig, SyntheticSpec, load_config, parse_controllers, parse_seeds
from .core import BoundsViolation, ValidationError
from .data import ParseError, SchemaError, generate_synthetic, save_scenario_csv
from .lp import NumericalFailure
from .mpc import MpcConfig, MpcController
from .report import emit_param_sweep, emit_report, emit_signal_sweep, format_table
from .scm import ScmConfig, ScmController
from .simulation import ExternalSignalConfig, IdleController, run_comparison, signal_sweep
from .stochastic import StochasticController

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pvdispatch", description="PV/battery/load dispatch simulation and benchmarking.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", type=Path, help="INI run configuration")
        p.add_argument("--scenario", type=Path, help="scenario CSV (overrides the config)")
        p.add_argument("--tariff", type=float, help="fixed adder on the spot price for buying")
        p.add_argument("--seeds", type=parse_seeds, help="e.g. 0-19 or 1,2,5")
        p.add_argument("--out", type=Path, help="output directory")

    p = sub.add_parser("simulate", help="run one controller on one scenario")
    common(p)
    p.add_argument("--controller", choices=CONTROLLER_NAMES, default="proposed")
    p.add_argument("--signal-probability", type=float)

    p = sub.add_parser("compare", help="run all configured controllers (cost/runtime table)")
    common(p)
    p.add_argument("--controllers", type=parse_controllers)
    p.add_argument("--signal-probability", type=float)
    p.add_argument("--no-trajectories", action="store_true", help="skip per-run trajectory CSVs")

    p = sub.add_parser("sweep-signals", help="cost gap of the proposed method over MPC versus signal probability")
    common(p)
    p.add_argument("--probabilities", type=_floats, default=[0.0, 0.1, 0.2, 0.3])

    p = sub.add_parser("sweep-params", help="parameter grid for each controller")
    common(p)
    p.add_argument("--deadbands", type=_floats, default=[0.1, 0.5, 1.0])
    p.add_argument("--horizons", type=_ints, default=[8, 16, 24])
    p.add_argument("--k-values", type=_floats, default=[0.3])

    p = sub.add_parser("gen-data", help="write a synthetic scenario CSV")
    p.add_argument("--days", type=int, default=30)
    p.add_argument("--month", type=int, default=1)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--dt", type=float, default=1.0)
    p.add_argument("--load-scale", type=float, default=1.0)
    p.add_argument("--pv-scale", type=float, default=1.0)
    p.add_argument("--out", type=Path, required=True, help="CSV path to write")
    return parser


def _resolve(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    updates = {}
    if args.scenario is not None:
        if not args.scenario.is_file():
            raise ConfigError(f"scenario file not found: {args.scenario}")
        updates["csv_path"] = args.scenario
    if args.tariff is not None:
        updates["tariff"] = args.tariff
    if args.seeds is not None:
        updates["seeds"] = args.seeds
    if args.out is not None:
        updates["output_dir"] = args.out
    if getattr(args, "controllers", None):
        updates["controllers"] = args.controllers
    if getattr(args, "signal_probability", None) is not None:
        updates["signals"] = replace(cfg.signals, probability=args.signal_probability)
    return replace(cfg, **updates)


def make_controller(name: str, cfg: RunConfig):
    if name == "idle":
        return IdleController()
    if name == "scm":
        return ScmController(cfg.scm)
    if name == "mpc":
        return MpcController(cfg.mpc)
    if name == "proposed":
        return StochasticController(cfg.srr)
    raise ConfigError(f"unknown controller {name!r}")


def cmd_simulate(args) -> int:
    cfg = _resolve(args)
    scenario = cfg.load_scenario()
    ctrl = make_controller(args.controller, cfg)
    result = run_comparison(scenario, [ctrl], cfg.battery, cfg.signals, cfg.seeds)
    written = emit_report(result, cfg.output_dir, cfg.battery)
    print((cfg.output_dir / "comparison.txt").read_text(), end="")
    print(f"wrote {len(written)} file(s) to {cfg.output_dir}")
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = _resolve(args)
    scenario = cfg.load_scenario()
    ctrls = [make_controller(n, cfg) for n in cfg.controllers]
    result = run_comparison(scenario, ctrls, cfg.battery, cfg.signals, cfg.seeds)
    written = emit_report(result, cfg.output_dir, cfg.battery, trajectories=not args.no_trajectories)
    print((cfg.output_dir / "comparison.txt").read_text(), end="")
    print(f"wrote {len(written)} file(s) to {cfg.output_dir}")
    return EXIT_OK


def cmd_sweep_signals(args) -> int:
    cfg = _resolve(args)
    for p in args.probabilities:
        ExternalSignalConfig(p, cfg.signals.direction_split)
    scenario = cfg.load_scenario()
    rows = signal_sweep(scenario, StochasticController(cfg.srr), MpcController(cfg.mpc), cfg.battery,
                        args.probabilities, cfg.seeds, cfg.signals.direction_split)
    emit_signal_sweep([(r.probability, r.cost_proposed, r.cost_mpc, r.gap_percent, r.gap_se) for r in rows],
                      cfg.output_dir)
    print((cfg.output_dir / "signals.txt").read_text(), end="")
    return EXIT_OK


def cmd_sweep_params(args) -> int:
    cfg = _resolve(args)
    scenario = cfg.load_scenario()
    grid = [("SCM", "deadband_kw", v, ScmController(ScmConfig(v))) for v in args.deadbands]
    grid += [("MPC", "horizon", h, MpcController(MpcConfig(h))) for h in args.horizons]
    grid += [("Proposed", "k", k, StochasticController(replace(cfg.srr, k_charge=k, k_discharge=k)))
             for k in args.k_values]
    rows = []
    for method, key, value, ctrl in grid:
        res = run_comparison(scenario, [ctrl], cfg.battery, cfg.signals, cfg.seeds, keep_reports=False)
        m = res.methods[0]
        rows.append((method, key, float(value), m.mean_cost, m.mean_runtime))
    emit_param_sweep(rows, cfg.output_dir)
    print((cfg.output_dir / "params.txt").read_text(), end="")
    return EXIT_OK


def cmd_gen_data(args) -> int:
    spec = SyntheticSpec(args.days, args.month, args.seed, args.dt)
    scenario = generate_synthetic(spec.days, spec.dt_hours, spec.seed, spec.month,
                                  load_scale=args.load_scale, pv_scale=args.pv_scale)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    save_scenario_csv(args.out, scenario)
    print(format_table(("file", "intervals", "dt_hours"), [(str(args.out), str(len(scenario)), f"{spec.dt_hours:g}")]),
          end="")
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "sweep-signals": cmd_sweep_signals,
    "sweep-params": cmd_sweep_params,
    "gen-data": cmd_gen_data,
}


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return EXIT_OK if not exc.code else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except (ParseError, SchemaError, ValidationError, ConfigError, FileNotFoundError, OSError, ValueError) as exc:
        print(f"pvdispatch: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NumericalFailure, BoundsViolation) as exc:
        print(f"pvdispatch: numerical error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001
        print(f"pvdispatch: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
