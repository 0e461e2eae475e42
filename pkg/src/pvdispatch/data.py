"""Scenario ingestion from CSV and a seeded synthetic scenario generator.

CSV schema (header required, column order fixed)::

    timestamp,load_kw,pv_kw,price_spot

``timestamp`` is ISO-8601. The buy price is ``price_spot + tariff`` and the
sell price is ``price_spot``. Floats are written with 17 significant digits
so a write/read round trip is exact.
"""

from __future__ import annotations

import csv
import math
from datetime import datetime, timedelta
from pathlib import Path

import numpy as np

from .core import ScenarioSeries, ValidationError

CSV_COLUMNS = ("timestamp", "load_kw", "pv_kw", "price_spot")
DEFAULT_TARIFF = 0.2
DEFAULT_START = datetime(2022, 5, 1)


class ParseError(ValueError):
    """Malformed CSV content; the message names the row and column."""


class SchemaError(ValueError):
    """CSV header does not match the documented schema."""


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def load_scenario_csv(path, tariff: float = DEFAULT_TARIFF) -> ScenarioSeries:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ParseError(f"{path}: empty file")
        header = [h.strip() for h in header]
        missing = [c for c in CSV_COLUMNS if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing column(s) {', '.join(missing)}")
        pos = {c: header.index(c) for c in CSV_COLUMNS}
        stamps, cols = [], {c: [] for c in CSV_COLUMNS[1:]}
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise ParseError(f"{path}: row {lineno}: expected {len(header)} fields, got {len(row)}")
            try:
                stamps.append(datetime.fromisoformat(row[pos["timestamp"]].strip()))
            except ValueError:
                raise ParseError(f"{path}: row {lineno}, column timestamp: bad ISO-8601 value") from None
            for c in CSV_COLUMNS[1:]:
                try:
                    value = float(row[pos[c]])
                except ValueError:
                    raise ParseError(f"{path}: row {lineno}, column {c}: not a number") from None
                if not math.isfinite(value):
                    raise ParseError(f"{path}: row {lineno}, column {c}: non-finite value")
                if c in ("load_kw", "pv_kw") and value < 0:
                    raise ValidationError(f"{path}: row {lineno}, column {c}: negative value {value}")
                cols[c].append(value)
    if not stamps:
        raise ParseError(f"{path}: no data rows")
    dt_hours = _infer_step(stamps, path)
    spot = np.array(cols["price_spot"])
    return ScenarioSeries(
        load_kw=np.array(cols["load_kw"]),
        pv_kw=np.array(cols["pv_kw"]),
        price_buy=spot + tariff,
        price_sell=spot,
        dt_hours=dt_hours,
    )


def _infer_step(stamps, path) -> float:
    if len(stamps) == 1:
        return 1.0
    steps = {(b - a).total_seconds() for a, b in zip(stamps, stamps[1:])}
    if len(steps) != 1 or min(steps) <= 0:
        raise ParseError(f"{path}: timestamps must be strictly increasing with a constant step")
    return steps.pop() / 3600.0


def save_scenario_csv(path, scenario: ScenarioSeries, tariff: float = DEFAULT_TARIFF,
                      start: datetime = DEFAULT_START) -> None:
    """Write ``scenario`` in the ingestion schema (spot = sell price)."""
    path = Path(path)
    step = timedelta(hours=scenario.dt_hours)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for t in range(len(scenario)):
            w.writerow([
                (start + t * step).isoformat(),
                fmt(scenario.load_kw[t]),
                fmt(scenario.pv_kw[t]),
                fmt(scenario.price_sell[t]),
            ])


# month -> (day length h, PV peak kW, mean spot price)
_SEASON = {
    1: (7.5, 1.0, 0.18), 2: (9.5, 1.5, 0.16), 3: (11.8, 2.1, 0.14), 4: (14.0, 2.6, 0.12),
    5: (16.0, 3.0, 0.12), 6: (17.3, 3.1, 0.13), 7: (16.8, 3.0, 0.15), 8: (14.8, 2.7, 0.16),
    9: (12.6, 2.25, 0.17), 10: (10.3, 1.7, 0.18), 11: (8.2, 1.15, 0.19), 12: (7.0, 0.9, 0.20),
}


def _bump(hour, center, width):
    d = (hour - center + 12.0) % 24.0 - 12.0
    return np.exp(-0.5 * (d / width) ** 2)


def generate_synthetic(days: int = 30, dt_hours: float = 1.0, seed: int = 0, month: int = 1,
                       tariff: float = DEFAULT_TARIFF, load_scale: float = 1.0,
                       pv_scale: float = 1.0) -> ScenarioSeries:
    """Seeded building-scale scenario for one stretch of ``days``.

    * load: about 55 kWh/day (times ``load_scale``) from a base level plus
      morning and evening peaks, with day-to-day scaling and noise;
    * PV: half-sine over the daylight window raised to 1.3, scaled by a
      per-day clearness factor and ``pv_scale``, exactly zero at night;
    * spot price: per-day level around the monthly mean times a daily
      profile (night trough, morning peak, solar-noon dip, evening peak)
      plus noise, floored at 0.005.

    Defaults keep PV below the load most of the time, with a pronounced
    daily price cycle.
    """
    if days < 1:
        raise ValueError("days must be >= 1")
    if not dt_hours > 0 or abs(24.0 / dt_hours - round(24.0 / dt_hours)) > 1e-9:
        raise ValueError("dt_hours must divide 24")
    if month not in _SEASON:
        raise ValueError("month must be in 1..12")
    rng = np.random.default_rng(np.random.SeedSequence(int(seed) & ((1 << 64) - 1)))
    per_day = int(round(24.0 / dt_hours))
    n = days * per_day
    hour = (np.arange(n) % per_day) * dt_hours + 0.5 * dt_hours
    day = np.arange(n) // per_day
    day_length, pv_peak, price_level = _SEASON[month]

    day_scale = rng.normal(1.0, 0.1, days)[day]
    load = load_scale * 2.0 * (
        0.45
        + 1.3 * _bump(hour, 7.5, 1.2)
        + 2.2 * _bump(hour, 18.5, 1.8)
        + 0.5 * _bump(hour, 12.5, 2.5)
    ) * day_scale * rng.lognormal(0.0, 0.15, n)

    sunrise = 12.5 - day_length / 2.0
    phase = (hour - sunrise) / day_length
    elevation = np.sin(np.pi * np.clip(phase, 0.0, 1.0))
    daylight = (phase > 0.0) & (phase < 1.0)
    clearness = np.clip(rng.beta(4.0, 1.6, days), 0.05, 1.0)[day]
    passing_clouds = np.clip(rng.normal(1.0, 0.12, n), 0.3, 1.0)
    pv = np.where(daylight, pv_scale * pv_peak * elevation ** 1.3 * clearness * passing_clouds, 0.0)

    level = np.clip(rng.normal(1.0, 0.1, days), 0.4, 2.0)[day]
    shape = (
        0.5
        - 0.3 * _bump(hour, 3.5, 2.5)
        + 0.6 * _bump(hour, 8.0, 1.5)
        - 0.2 * _bump(hour, 13.5, 2.0) * clearness
        + 1.0 * _bump(hour, 19.0, 2.2)
    )
    spot = price_level * level * shape + rng.normal(0.0, 0.01, n)
    spot = np.maximum(spot, 0.005)
    return ScenarioSeries(
        load_kw=np.round(load, 4),
        pv_kw=np.round(pv, 4),
        price_buy=np.round(spot, 5) + tariff,
        price_sell=np.round(spot, 5),
        dt_hours=dt_hours,
    )
