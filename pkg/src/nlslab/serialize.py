"""
Deterministic CSV/JSON serialization of runs, reports and scans.

Every float is written with 17 significant digits so that outputs are
byte-identical across runs of the same configuration.  Files are written to
a temporary sibling and renamed into place.
"""

from __future__ import annotations

import csv
import io
import json
import os
from pathlib import Path

import numpy as np

from .charges import ChargeSpec, DriftRow, charge_series, energy, mass, momentum, variance
from .effective import ComparisonReport, EffectiveState
from .geometry import Trajectory
from .grid import Field
from .presymplectic import ScanResult

__all__ = [
    "fmt",
    "atomic_write_text",
    "write_field_csv",
    "read_field_csv",
    "write_trajectory_dir",
    "write_observables_csv",
    "write_drift_csv",
    "write_drift_text",
    "write_scan_csv",
    "scan_metadata",
    "write_effective_csv",
    "write_comparison_csv",
    "write_manifest",
]

# re-exported so all file I/O is reachable from one module
from .grid import read_field_csv, write_field_csv  # noqa: E402  (re-export)


def fmt(x: float) -> str:
    return f"{float(x):.17g}"


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _csv_text(rows: list[list[str]]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def write_trajectory_dir(traj: Trajectory, directory: str | os.PathLike) -> Path:
    """Per-time field CSVs plus an index (time, filename, mass, energy)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    rows = [["time", "filename", "mass", "energy"]]
    for i, (t, state) in enumerate(zip(traj.times, traj.states)):
        name = f"field_{i:06d}.csv"
        tmp = directory / (name + ".tmp")
        write_field_csv(state, tmp)
        os.replace(tmp, directory / name)
        rows.append([fmt(t), name, fmt(mass(state)), fmt(energy(state, traj.p))])
    atomic_write_text(directory / "index.csv", _csv_text(rows))
    return directory


def write_observables_csv(
    traj: Trajectory, charges: list[ChargeSpec], path: str | os.PathLike
) -> None:
    """Columns t, mass, momentum, energy, variance, then one per charge."""
    base = ["t", "mass", "momentum", "energy", "variance"]
    extra = [c for c in charges if c.name not in base]
    series = {c.name: charge_series(traj, c) for c in extra}
    rows = [base + [c.name for c in extra]]
    for i, (t, u) in enumerate(zip(traj.times, traj.states)):
        row = [
            fmt(t),
            fmt(mass(u)),
            fmt(momentum(u)),
            fmt(energy(u, traj.p)),
            fmt(variance(u)),
        ]
        row += [fmt(series[c.name][i]) for c in extra]
        rows.append(row)
    atomic_write_text(path, _csv_text(rows))


def write_drift_csv(rows: list[DriftRow], path: str | os.PathLike) -> None:
    out = [["charge", "t0_value", "max_abs_drift", "max_rel_drift", "t_at_max"]]
    for r in rows:
        out.append(
            [r.charge, fmt(r.initial), fmt(r.max_abs_drift), fmt(r.max_rel_drift), fmt(r.t_at_max)]
        )
    atomic_write_text(path, _csv_text(out))


def write_drift_text(rows: list[DriftRow], path: str | os.PathLike) -> None:
    lines = [f"{'charge':<16} {'t0 value':>24} {'max |drift|':>14} {'max rel':>10} {'at t':>10}"]
    for r in rows:
        lines.append(
            f"{r.charge:<16} {r.initial:>24.16e} {r.max_abs_drift:>14.3e} "
            f"{r.max_rel_drift:>10.2e} {r.t_at_max:>10.4f}"
        )
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_scan_csv(result: ScanResult, path: str | os.PathLike) -> None:
    """Header row: axis2 values; first column: axis1 values; cells: Pf."""
    header = [f"{result.axis1_name}|{result.axis2_name}"] + [
        fmt(v) for v in result.axis2_values
    ]
    rows = [header]
    for i, v1 in enumerate(result.axis1_values):
        rows.append([fmt(v1)] + [fmt(x) for x in result.pf[i]])
    atomic_write_text(path, _csv_text(rows))


def scan_metadata(result: ScanResult, extra: dict | None = None) -> dict:
    meta = {
        "manifold": result.manifold,
        "axis1": {
            "name": result.axis1_name,
            "lo": result.axis1_values[0],
            "hi": result.axis1_values[-1],
            "n": len(result.axis1_values),
        },
        "axis2": {
            "name": result.axis2_name,
            "lo": result.axis2_values[0],
            "hi": result.axis2_values[-1],
            "n": len(result.axis2_values),
        },
        "fixed": result.fixed,
        "tolerance": result.tol,
        "curve_count": result.curve_count,
        "zero_cells": [list(c) for c in result.zero_cells],
        "zero_segments": [
            [[p1[0], p1[1]], [p2[0], p2[1]]] for p1, p2 in result.segments
        ],
    }
    if extra:
        meta.update(extra)
    return meta


def write_effective_csv(
    states: list[EffectiveState], param_names: tuple[str, ...], path: str | os.PathLike
) -> None:
    rows = [["t", *param_names, "omega_condition"]]
    for s in states:
        rows.append([fmt(s.time), *(fmt(v) for v in s.theta), fmt(s.omega_condition)])
    atomic_write_text(path, _csv_text(rows))


def write_comparison_csv(report: ComparisonReport, path: str | os.PathLike) -> None:
    names = sorted(report.pde)
    header = ["t"]
    for n in names:
        header += [f"{n}_pde", f"{n}_ansatz", f"{n}_dev"]
    rows = [header]
    for i, t in enumerate(report.times):
        row = [fmt(t)]
        for n in names:
            row += [fmt(report.pde[n][i]), fmt(report.ansatz[n][i]), fmt(report.deviations[n][i])]
        rows.append(row)
    atomic_write_text(path, _csv_text(rows))


def write_manifest(
    path: str | os.PathLike, config_echo: dict, version: str, wall_time: float, **extra
) -> None:
    payload = {
        "config": config_echo,
        "code_version": version,
        "wall_time_seconds": wall_time,
        **extra,
    }
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True, default=_jsonable) + "\n")


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj)!r}")
