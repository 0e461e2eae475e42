"""Run configuration read from an INI file.

Example::

    [scenario]
    csv = data/building.csv        ; or omit and use the synthetic_* keys
    synthetic_days = 30
    synthetic_month = 1
    synthetic_seed = 1
    dt_hours = 1
    tariff = 0.2

    [battery]
    nominal_capacity_kwh = 13.5
    charge_rate_kw = 7
    discharge_rate_kw = 7
    eff_charge = 0.97
    eff_discharge = 1
    soc_max = 0.9
    soc_min = 0.1
    soc_init = 0.3

    [scm]
    deadband_kw = 0.1

    [mpc]
    horizon = 24

    [stochastic]
    k_charge = 0.3
    k_discharge = 0.3
    epsilon = 1e-6

    [signals]
    probability = 0
    direction_split = 0.5

    [run]
    controllers = scm, mpc, proposed
    seeds = 0-19
    output_dir = results

Every key is optional; missing keys take the defaults shown.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .core import BatteryParams, ScenarioSeries, ValidationError
from .data import DEFAULT_TARIFF, generate_synthetic, load_scenario_csv
from .mpc import MpcConfig
from .scm import ScmConfig
from .simulation import ExternalSignalConfig
from .stochastic import SrrConfig

CONTROLLER_NAMES = ("idle", "scm", "mpc", "proposed")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SyntheticSpec:
    days: int = 30
    month: int = 1
    seed: int = 1
    dt_hours: float = 1.0


@dataclass(frozen=True)
class RunConfig:
    csv_path: Path | None = None
    synthetic: SyntheticSpec = field(default_factory=SyntheticSpec)
    tariff: float = DEFAULT_TARIFF
    battery: BatteryParams = field(default_factory=BatteryParams)
    scm: ScmConfig = field(default_factory=ScmConfig)
    mpc: MpcConfig = field(default_factory=MpcConfig)
    srr: SrrConfig = field(default_factory=SrrConfig)
    signals: ExternalSignalConfig = field(default_factory=ExternalSignalConfig)
    controllers: tuple[str, ...] = ("scm", "mpc", "proposed")
    seeds: tuple[int, ...] = (0,)
    output_dir: Path = Path("results")

    def load_scenario(self) -> ScenarioSeries:
        if self.csv_path is not None:
            return load_scenario_csv(self.csv_path, tariff=self.tariff)
        s = self.synthetic
        return generate_synthetic(s.days, s.dt_hours, s.seed, s.month, tariff=self.tariff)


def parse_seeds(text: str) -> tuple[int, ...]:
    """``"0-3, 7"`` -> ``(0, 1, 2, 3, 7)``."""
    seeds = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        lo, sep, hi = part.partition("-")
        try:
            if sep:
                if int(hi) < int(lo):
                    raise ConfigError(f"bad seed range {part!r}")
                seeds.extend(range(int(lo), int(hi) + 1))
            else:
                seeds.append(int(part))
        except ValueError:
            raise ConfigError(f"bad seed {part!r}") from None
    if not seeds:
        raise ConfigError("at least one seed is required")
    return tuple(seeds)


def parse_controllers(text: str) -> tuple[str, ...]:
    names = tuple(n.strip().lower() for n in text.split(",") if n.strip())
    unknown = [n for n in names if n not in CONTROLLER_NAMES]
    if unknown or not names:
        raise ConfigError(f"unknown controller(s) {unknown}; choose from {', '.join(CONTROLLER_NAMES)}")
    return names


def _section(dc, parser, name):
    """Overlay the ``name`` section onto dataclass instance ``dc``."""
    if not parser.has_section(name):
        return dc
    known = {f.name: f.type for f in fields(dc)}
    updates = {}
    for key, raw in parser.items(name):
        if key not in known:
            raise ConfigError(f"[{name}] unknown key {key!r}")
        current = getattr(dc, key)
        try:
            updates[key] = type(current)(float(raw)) if isinstance(current, (int, float)) else raw
        except ValueError:
            raise ConfigError(f"[{name}] {key}: not a number: {raw!r}") from None
        if isinstance(current, int) and float(raw) != int(float(raw)):
            raise ConfigError(f"[{name}] {key}: expected an integer, got {raw!r}")
    try:
        return replace(dc, **updates)
    except ValidationError as exc:
        raise ConfigError(f"[{name}] {exc}") from None


def load_config(path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    parser.read(path)
    cfg = RunConfig()
    base = path.parent

    if parser.has_section("scenario"):
        sc = dict(parser.items("scenario"))
        csv_path = sc.pop("csv", None)
        tariff = float(sc.pop("tariff", cfg.tariff))
        synth = {}
        for key in ("synthetic_days", "synthetic_month", "synthetic_seed"):
            if key in sc:
                synth[key.removeprefix("synthetic_")] = int(sc.pop(key))
        if "dt_hours" in sc:
            synth["dt_hours"] = float(sc.pop("dt_hours"))
        if sc:
            raise ConfigError(f"[scenario] unknown key(s) {sorted(sc)}")
        if csv_path:
            csv_path = Path(csv_path)
            if not csv_path.is_absolute():
                csv_path = base / csv_path
            if not csv_path.is_file():
                raise ConfigError(f"[scenario] csv file not found: {csv_path}")
        cfg = replace(cfg, csv_path=csv_path or None, tariff=tariff, synthetic=replace(cfg.synthetic, **synth))

    cfg = replace(
        cfg,
        battery=_section(cfg.battery, parser, "battery"),
        scm=_section(cfg.scm, parser, "scm"),
        mpc=_section(cfg.mpc, parser, "mpc"),
        srr=_section(cfg.srr, parser, "stochastic"),
        signals=_section(cfg.signals, parser, "signals"),
    )
    if parser.has_section("run"):
        run = dict(parser.items("run"))
        if "controllers" in run:
            cfg = replace(cfg, controllers=parse_controllers(run.pop("controllers")))
        if "seeds" in run:
            cfg = replace(cfg, seeds=parse_seeds(run.pop("seeds")))
        if "output_dir" in run:
            out = Path(run.pop("output_dir"))
            cfg = replace(cfg, output_dir=out if out.is_absolute() else base / out)
        if run:
            raise ConfigError(f"[run] unknown key(s) {sorted(run)}")
    known = {"scenario", "battery", "scm", "mpc", "stochastic", "signals", "run"}
    extra = set(parser.sections()) - known
    if extra:
        raise ConfigError(f"unknown section(s) {sorted(extra)}")
    return cfg
