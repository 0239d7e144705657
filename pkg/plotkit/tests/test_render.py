import csv
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from plotkit import PlotJob, SchemaError, render
from plotkit.render import main

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def write_csv(path, rows):
    with open(path, "w", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(rows)


@pytest.fixture
def scan_inputs(tmp_path):
    """Synthetic degeneracy-scan CSV with one sign-changing curve."""
    eta = np.linspace(0.1, 1.0, 12)
    a = np.linspace(0.2, 1.1, 10)
    pf = np.subtract.outer(eta, a)  # zero along eta = a
    rows = [["eta|a"] + [f"{v:.17g}" for v in a]]
    for i, e in enumerate(eta):
        rows.append([f"{e:.17g}"] + [f"{v:.17g}" for v in pf[i]])
    csv_path = tmp_path / "scan.csv"
    write_csv(csv_path, rows)
    meta = {
        "axis1": {"name": "eta"},
        "axis2": {"name": "a"},
        "curve_count": 1,
        "zero_segments": [[[0.3, 0.3], [0.5, 0.5]], [[0.5, 0.5], [0.9, 0.9]]],
        "zero_cells": [[2, 1], [3, 2]],
    }
    (tmp_path / "scan_meta.json").write_text(json.dumps(meta))
    return csv_path


@pytest.fixture
def observables_csv(tmp_path):
    t = np.linspace(0.0, 5.0, 40)
    rows = [["t", "mass", "momentum", "energy", "variance", "galilean"]]
    for tt in t:
        rows.append([
            f"{tt:.17g}",
            f"{2.0 + 1e-13 * np.sin(tt):.17g}",
            f"{0.6:.17g}",
            f"{-0.1216:.17g}",
            f"{0.148 + 0.0595 * tt**2:.17g}",
            f"{1e-9 * tt:.17g}",
        ])
    path = tmp_path / "observables.csv"
    write_csv(path, rows)
    return path


@pytest.fixture
def effective_csv(tmp_path):
    t = np.linspace(0.0, 5.0, 30)
    rows = [["t", "eta", "Z", "V", "phi", "omega_condition"]]
    for tt in t:
        rows.append([
            f"{tt:.17g}", "1", f"{0.3 * tt:.17g}", "0.3",
            f"{0.455 * tt:.17g}", f"{2.1:.17g}",
        ])
    path = tmp_path / "effective.csv"
    write_csv(path, rows)
    return path


class TestHeatmap:
    def test_renders_png(self, scan_inputs, tmp_path):
        out = tmp_path / "heat.png"
        render(PlotJob("heatmap", scan_inputs, out))
        data = out.read_bytes()
        assert data.startswith(PNG_MAGIC)
        assert len(data) > 5000

    def test_deterministic_bytes(self, scan_inputs, tmp_path):
        out1, out2 = tmp_path / "h1.png", tmp_path / "h2.png"
        render(PlotJob("heatmap", scan_inputs, out1))
        render(PlotJob("heatmap", scan_inputs, out2))
        assert out1.read_bytes() == out2.read_bytes()

    def test_overlay_changes_output(self, scan_inputs, tmp_path):
        # dropping the metadata sidecar removes the zero-curve overlay
        with_meta = tmp_path / "with.png"
        render(PlotJob("heatmap", scan_inputs, with_meta))
        (scan_inputs.parent / "scan_meta.json").unlink()
        without = tmp_path / "without.png"
        render(PlotJob("heatmap", scan_inputs, without))
        assert with_meta.read_bytes() != without.read_bytes()

    def test_rejects_missing_axis_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        write_csv(path, [["x", "1", "2"], ["0.1", "3", "4"]])
        with pytest.raises(SchemaError):
            render(PlotJob("heatmap", path, tmp_path / "o.png"))

    def test_rejects_ragged_rows(self, tmp_path):
        path = tmp_path / "ragged.csv"
        write_csv(path, [["eta|a", "1", "2"], ["0.1", "3"]])
        with pytest.raises(SchemaError):
            render(PlotJob("heatmap", path, tmp_path / "o.png"))


class TestDrift:
    def test_renders(self, observables_csv, tmp_path):
        out = tmp_path / "drift.png"
        render(PlotJob("drift", observables_csv, out))
        assert out.read_bytes().startswith(PNG_MAGIC)

    def test_needs_time_column(self, tmp_path):
        path = tmp_path / "bad.csv"
        write_csv(path, [["x", "mass"], ["0", "1"]])
        with pytest.raises(SchemaError):
            render(PlotJob("drift", path, tmp_path / "o.png"))


class TestParabola:
    def test_renders(self, observables_csv, tmp_path):
        out = tmp_path / "parabola.png"
        render(PlotJob("parabola", observables_csv, out))
        assert out.read_bytes().startswith(PNG_MAGIC)

    def test_needs_variance(self, tmp_path):
        path = tmp_path / "bad.csv"
        write_csv(path, [["t", "mass"], ["0", "1"], ["1", "1"]])
        with pytest.raises(SchemaError):
            render(PlotJob("parabola", path, tmp_path / "o.png"))


class TestTrajectory:
    def test_renders(self, effective_csv, tmp_path):
        out = tmp_path / "traj.png"
        render(PlotJob("trajectory", effective_csv, out))
        assert out.read_bytes().startswith(PNG_MAGIC)

    def test_needs_condition_column(self, tmp_path):
        path = tmp_path / "bad.csv"
        write_csv(path, [["t", "eta"], ["0", "1"], ["1", "1"]])
        with pytest.raises(SchemaError):
            render(PlotJob("trajectory", path, tmp_path / "o.png"))


class TestJobValidation:
    def test_unknown_kind(self, tmp_path):
        with pytest.raises(SchemaError):
            PlotJob("surface", tmp_path / "a.csv", tmp_path / "b.png")

    def test_empty_csv(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(SchemaError):
            render(PlotJob("drift", path, tmp_path / "o.png"))


class TestCli:
    def test_exit_codes(self, observables_csv, tmp_path, capsys):
        out = tmp_path / "out.png"
        assert main(["render", "drift", str(observables_csv), str(out)]) == 0
        assert out.exists()
        bad = tmp_path / "bad.csv"
        bad.write_text("")
        assert main(["render", "drift", str(bad), str(tmp_path / "x.png")]) == 2
        assert "schema error" in capsys.readouterr().err
        assert main(["render", "drift", str(tmp_path / "missing.csv"),
                     str(tmp_path / "y.png")]) == 4


@pytest.fixture(scope="module")
def scan_dir(tmp_path_factory):
    """Real degeneracy-scan output produced through the simulation CLI."""
    tmp = tmp_path_factory.mktemp("simscan")
    config = {
        "grid": {"n": 1024, "length": 120.0},
        "power": 3.0,
        "scan": {
            "manifold": "ghw_restricted",
            "gamma": 0.1,
            "axis1": {"name": "eta", "lo": 0.05, "hi": 1.2, "n": 64},
            "axis2": {"name": "a", "lo": 0.11, "hi": 1.2, "n": 64},
            "fixed": {"phi": 0.0, "psi": 0.7853981633974483},
        },
        "output_dir": str(tmp / "out"),
    }
    cfg_path = tmp / "scan.json"
    cfg_path.write_text(json.dumps(config))
    proc = subprocess.run(
        [sys.executable, "-m", "nlslab.cli", "scan", str(cfg_path)],
        capture_output=True, text=True,
    )
    if proc.returncode != 0:
        pytest.skip(f"simulation CLI unavailable: {proc.stderr.strip()[:200]}")
    return tmp / "out"


class TestAgainstSimulationOutput:
    """End to end: render the scan CSV written by the simulation CLI,
    with its zero-curve overlay, deterministically."""

    def test_heatmap_with_overlay_is_deterministic(self, scan_dir, tmp_path):
        meta = json.loads((scan_dir / "scan_meta.json").read_text())
        assert meta["curve_count"] >= 2
        assert len(meta["zero_segments"]) > 0
        out1, out2 = tmp_path / "fig1.png", tmp_path / "fig2.png"
        render(PlotJob("heatmap", scan_dir / "scan.csv", out1))
        render(PlotJob("heatmap", scan_dir / "scan.csv", out2))
        data = out1.read_bytes()
        assert data.startswith(PNG_MAGIC)
        assert len(data) > 10000
        assert data == out2.read_bytes()
