"""Report emission: aligned text tables, machine-readable CSVs, trajectory CSVs.

Only wall-clock runtimes vary between identical runs, so they live in their
own ``*runtime.csv`` files; every other CSV is byte-for-byte reproducible.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence

from .core import BatteryParams
from .data import fmt
from .simulation import ComparisonResult, SimulationReport

TRAJECTORY_COLUMNS = ("interval", "soc", "charge", "discharge", "buy", "sell", "cost")


def _write_csv(path: Path, header, rows) -> None:
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def format_table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(str(h)), *(len(str(r[i])) for r in rows)) for i, h in enumerate(header)]
    lines = ["  ".join(str(h).ljust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for r in rows:
        lines.append("  ".join(str(c).rjust(w) if i else str(c).ljust(w) for i, (c, w) in enumerate(zip(r, widths))))
    return "\n".join(lines) + "\n"


def write_trajectory(path, report: SimulationReport, params: BatteryParams) -> None:
    soc = report.soc(params)
    rows = (
        (t, fmt(soc[t]), fmt(report.charge_kw[t]), fmt(report.discharge_kw[t]),
         fmt(report.grid_buy_kw[t]), fmt(report.grid_sell_kw[t]), fmt(report.interval_cost[t]))
        for t in range(len(report))
    )
    _write_csv(Path(path), TRAJECTORY_COLUMNS, rows)


def _slug(name: str) -> str:
    return "".join(ch if ch.isalnum() else "_" for ch in name).strip("_").lower()


def emit_report(result: ComparisonResult, out_dir, params: BatteryParams | None = None,
                trajectories: bool = True) -> list[Path]:
    """Write a comparison to ``out_dir`` and return the written paths.

    Files: ``comparison.txt`` (human-readable), ``comparison.csv``
    (``method,cost,std_cost,runs``), ``runtime.csv`` (``method,runtime_s``),
    ``differences.csv`` (``method_a,method_b,percent``) and, when
    ``trajectories`` is set, one ``trajectories/<method>_seed<seed>.csv`` per
    run with columns ``interval,soc,charge,discharge,buy,sell,cost``.
    """
    if not result.methods:
        raise ValueError("nothing to report")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    text_rows = [
        (m.method, f"{m.mean_cost:.4f}", f"{m.std_cost:.4f}", str(len(m.costs)), f"{m.mean_runtime:.4f}")
        for m in result.methods
    ]
    text = format_table(("method", "cost", "std_cost", "runs", "runtime_s"), text_rows)
    diffs = result.differences()
    if diffs:
        text += "\n" + format_table(("method_a", "method_b", "difference_%"),
                                    [(a, b, f"{d:.3f}") for a, b, d in diffs])
    path = out / "comparison.txt"
    path.write_text(text)
    written.append(path)

    path = out / "comparison.csv"
    _write_csv(path, ("method", "cost", "std_cost", "runs"),
               [(m.method, fmt(m.mean_cost), fmt(m.std_cost), len(m.costs)) for m in result.methods])
    written.append(path)
    path = out / "runtime.csv"
    _write_csv(path, ("method", "runtime_s"), [(m.method, fmt(m.mean_runtime)) for m in result.methods])
    written.append(path)
    path = out / "differences.csv"
    _write_csv(path, ("method_a", "method_b", "percent"), [(a, b, fmt(d)) for a, b, d in diffs])
    written.append(path)

    if trajectories and params is not None:
        tdir = out / "trajectories"
        tdir.mkdir(exist_ok=True)
        for m in result.methods:
            for rep in m.reports:
                path = tdir / f"{_slug(m.method)}_seed{rep.seed}.csv"
                write_trajectory(path, rep, params)
                written.append(path)
    return written


def emit_signal_sweep(rows, out_dir) -> list[Path]:
    """``rows``: ``(probability, cost_proposed, cost_mpc, gap_percent, gap_se)`` tuples."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    header = ("probability", "cost_proposed", "cost_mpc", "gap_percent", "gap_se")
    path_csv = out / "signals.csv"
    _write_csv(path_csv, header, [tuple(fmt(v) for v in r) for r in rows])
    path_txt = out / "signals.txt"
    path_txt.write_text(format_table(
        ("probability", "MPC", "Proposed", "% of difference"),
        [(f"{p:.0%}", f"{cm:.2f}", f"{cp:.2f}", f"{g:.3f}") for p, cp, cm, g, _ in rows],
    ))
    return [path_csv, path_txt]


def emit_param_sweep(rows, out_dir) -> list[Path]:
    """``rows``: ``(method, parameter, value, cost, runtime_s)`` tuples."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    p1 = out / "params.csv"
    _write_csv(p1, ("method", "parameter", "value", "cost"), [(m, k, fmt(v), fmt(c)) for m, k, v, c, _ in rows])
    p2 = out / "params_runtime.csv"
    _write_csv(p2, ("method", "parameter", "value", "runtime_s"), [(m, k, fmt(v), fmt(r)) for m, k, v, _, r in rows])
    p3 = out / "params.txt"
    p3.write_text(format_table(("method", "parameter", "value", "cost", "runtime_s"),
                               [(m, k, f"{v:g}", f"{c:.4f}", f"{r:.4f}") for m, k, v, c, r in rows]))
    return [p1, p2, p3]
