"""
Render nlslab CSV outputs to raster images.

Plot kinds
----------
heatmap     degeneracy-scan CSV (header row: second-axis values, first
            column: first-axis values, cells: Pfaffian) with the zero-level
            set from the metadata sidecar overlaid as contour marks
drift       observables CSV (t, mass, momentum, energy, variance, ...):
            deviation of every conserved column from its initial value
parabola    observables CSV: the variance column against time with its
            least-squares quadratic and the fit residual
trajectory  effective-trajectory CSV (t, parameters..., omega_condition)

Output is deterministic: fixed figure geometry, no timestamps, pinned PNG
metadata, so re-rendering identical inputs gives identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["PlotJob", "SchemaError", "render", "main"]

KINDS = ("heatmap", "drift", "parabola", "trajectory")

# identical inputs must give identical bytes
SAVEFIG_OPTS = {"dpi": 130, "metadata": {"Software": "plotkit"}}


class SchemaError(ValueError):
    """Input CSV does not match the documented schema."""


@dataclass(frozen=True)
class PlotJob:
    kind: str
    input_csv: Path
    output_image: Path
    metadata: Path | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise SchemaError(f"unknown plot kind {self.kind!r}; expected one of {KINDS}")


def _read_rows(path: Path) -> list[list[str]]:
    try:
        with open(path, newline="") as fh:
            rows = [row for row in csv.reader(fh) if row]
    except OSError as err:
        raise err
    if len(rows) < 2:
        raise SchemaError(f"{path}: no data rows")
    return rows


def _floats(row: list[str], path: Path) -> list[float]:
    try:
        return [float(c) for c in row]
    except ValueError:
        raise SchemaError(f"{path}: non-numeric cell in {row[:4]}...") from None


def _sidecar(job: PlotJob) -> dict:
    candidates = []
    if job.metadata is not None:
        candidates.append(Path(job.metadata))
    stem = job.input_csv
    candidates.append(stem.with_name(stem.stem + "_meta.json"))
    candidates.append(stem.with_name("scan_meta.json"))
    for path in candidates:
        if path.is_file():
            return json.loads(path.read_text())
    return {}


def _render_heatmap(job: PlotJob, ax) -> None:
    rows = _read_rows(job.input_csv)
    header = rows[0]
    if "|" not in header[0]:
        raise SchemaError(
            f"{job.input_csv}: first header cell should name both axes as 'a1|a2'"
        )
    axis2 = np.array(_floats(header[1:], job.input_csv))
    body = np.array([_floats(r, job.input_csv) for r in rows[1:]])
    if body.shape[1] != axis2.size + 1:
        raise SchemaError(f"{job.input_csv}: ragged rows")
    axis1 = body[:, 0]
    pf = body[:, 1:]

    meta = _sidecar(job)
    name1, name2 = header[0].split("|", 1)
    name1 = meta.get("axis1", {}).get("name", name1)
    name2 = meta.get("axis2", {}).get("name", name2)

    vmax = float(np.max(np.abs(pf))) or 1.0
    mesh = ax.pcolormesh(
        axis1, axis2, pf.T, cmap="RdBu_r", vmin=-vmax, vmax=vmax, shading="nearest"
    )
    plt.colorbar(mesh, ax=ax, label="Pf")
    for seg in meta.get("zero_segments", []):
        (p1, p2) = seg
        ax.plot([p1[0], p2[0]], [p1[1], p2[1]], color="black", lw=1.2)
    ax.set_xlabel(name1)
    ax.set_ylabel(name2)
    curves = meta.get("curve_count")
    title = "restricted-form degeneracy scan"
    if curves is not None:
        title += f" ({curves} zero curve{'s' if curves != 1 else ''})"
    ax.set_title(title)


def _read_table(path: Path) -> tuple[list[str], np.ndarray]:
    rows = _read_rows(path)
    header = rows[0]
    data = np.array([_floats(r, path) for r in rows[1:]])
    if data.shape[1] != len(header):
        raise SchemaError(f"{path}: ragged rows")
    return header, data


def _render_drift(job: PlotJob, ax) -> None:
    header, data = _read_table(job.input_csv)
    if header[0] != "t":
        raise SchemaError(f"{job.input_csv}: expected a leading 't' column")
    t = data[:, 0]
    for i, name in enumerate(header[1:], start=1):
        if name == "variance":
            continue  # not conserved; it has its own plot kind
        ax.plot(t, data[:, i] - data[0, i], label=name)
    ax.set_xlabel("t")
    ax.set_ylabel("deviation from initial value")
    ax.set_title("conserved-charge drift")
    ax.legend(loc="upper left", fontsize=8)


def _render_parabola(job: PlotJob, ax) -> None:
    header, data = _read_table(job.input_csv)
    if "variance" not in header:
        raise SchemaError(f"{job.input_csv}: no 'variance' column")
    t = data[:, 0]
    v = data[:, header.index("variance")]
    c2, c1, c0 = np.polyfit(t, v, 2)
    fit = c0 + c1 * t + c2 * t**2
    resid = float(np.max(np.abs(v - fit)))
    ax.plot(t, v, ".", ms=2.5, label="variance")
    ax.plot(t, fit, "-", lw=1.0,
            label=f"fit {c0:.4g} + {c1:.4g} t + {c2:.4g} t^2")
    ax.set_xlabel("t")
    ax.set_ylabel("second spatial moment")
    ax.set_title(f"variance parabola (max fit residual {resid:.2e})")
    ax.legend(loc="upper left", fontsize=8)


def _render_trajectory(job: PlotJob, ax) -> None:
    header, data = _read_table(job.input_csv)
    if header[0] != "t" or header[-1] != "omega_condition":
        raise SchemaError(
            f"{job.input_csv}: expected columns t, <parameters...>, omega_condition"
        )
    t = data[:, 0]
    for i, name in enumerate(header[1:-1], start=1):
        ax.plot(t, data[:, i], label=name)
    ax.set_xlabel("t")
    ax.set_ylabel("parameter value")
    twin = ax.twinx()
    twin.plot(t, data[:, -1], ls="--", color="gray", lw=0.8)
    twin.set_ylabel("condition number of the restricted form", fontsize=8)
    ax.set_title("effective trajectory")
    ax.legend(loc="upper left", fontsize=8)


_RENDERERS = {
    "heatmap": _render_heatmap,
    "drift": _render_drift,
    "parabola": _render_parabola,
    "trajectory": _render_trajectory,
}


def render(job: PlotJob) -> Path:
    """Render the job to its output image; returns the output path."""
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    try:
        _RENDERERS[job.kind](job, ax)
        fig.tight_layout()
        fig.savefig(job.output_image, **SAVEFIG_OPTS)
    finally:
        plt.close(fig)
    return Path(job.output_image)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="plotkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render")
    p.add_argument("kind", choices=KINDS)
    p.add_argument("input_csv")
    p.add_argument("output_image")
    p.add_argument("--metadata", default=None, help="metadata sidecar (default: auto-discover)")
    args = parser.parse_args(argv)

    try:
        job = PlotJob(
            kind=args.kind,
            input_csv=Path(args.input_csv),
            output_image=Path(args.output_image),
            metadata=Path(args.metadata) if args.metadata else None,
        )
        render(job)
    except SchemaError as err:
        print(f"schema error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
