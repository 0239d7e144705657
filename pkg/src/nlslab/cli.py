"""
Experiment runner: JSON config in, deterministic CSV out.

Subcommands
-----------
evolve     integrate the flow, write trajectory + observables + drift report
scan       map the Pfaffian of a restricted form over a parameter window
effective  integrate collective coordinates and compare with the PDE
charges    evaluate the registered charges on the configured initial field
selftest   run the acceptance suite

Exit codes: 0 success, 2 config error, 3 numerical failure (blow-up or
degeneracy), 4 I/O error.  All floats are serialized with 17 significant
digits, so identical configs produce byte-identical CSVs.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .charges import standard_charges
from .effective import DegenerateOmegaError, DomainExitError, compare_with_pde
from .geometry import validate_power
from .grid import Field, Grid, make_grid, read_field_csv
from .presymplectic import (
    AnsatzManifold,
    darboux_manifold,
    degeneracy_scan,
    ghw_ansatz,
    ghw_manifold,
    parabolic_plane_manifold,
    single_soliton_manifold,
)
from .profiles import gaussian_profile, random_localized, sech_profile
from .propagate import BlowUpError, StepConfig, evolve, exact_soliton
from . import serialize

__all__ = ["main", "ConfigError", "load_config"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


class ConfigError(ValueError):
    """Configuration problem; the message names the offending key."""


def _need(section: dict, key: str, where: str):
    if key not in section:
        raise ConfigError(f"missing required key '{where}.{key}'" if where else
                          f"missing required key '{key}'")
    return section[key]


def _as_mapping(obj, where: str) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError(f"'{where}' must be a mapping")
    return obj


class ExperimentConfig:
    """Validated view of the JSON experiment description."""

    KNOWN_KEYS = {
        "grid", "power", "init", "step", "charges", "scan", "effective",
        "seed", "output_dir",
    }

    def __init__(self, raw: dict):
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a JSON object")
        unknown = set(raw) - self.KNOWN_KEYS
        if unknown:
            raise ConfigError(f"unknown config key '{sorted(unknown)[0]}'")
        self.raw = raw
        self.seed = int(raw.get("seed", 0))
        self.output_dir = raw.get("output_dir")

        grid_cfg = _as_mapping(_need(raw, "grid", ""), "grid")
        try:
            self.grid = make_grid(int(_need(grid_cfg, "n", "grid")),
                                  float(_need(grid_cfg, "length", "grid")))
        except ValueError as err:
            raise ConfigError(f"grid: {err}") from None

        try:
            self.power = validate_power(_need(raw, "power", ""))
        except ValueError as err:
            raise ConfigError(f"power: {err}") from None

        self.step = None
        if "step" in raw:
            step_cfg = _as_mapping(raw["step"], "step")
            try:
                self.step = StepConfig(
                    dt=float(_need(step_cfg, "dt", "step")),
                    t_final=float(_need(step_cfg, "t_final", "step")),
                    observer_stride=int(step_cfg.get("stride", 1)),
                )
            except ValueError as err:
                raise ConfigError(f"step: {err}") from None

        self.charge_names = raw.get("charges", ["mass", "momentum", "energy"])
        try:
            self.charges = standard_charges(self.charge_names)
        except ValueError as err:
            raise ConfigError(f"charges: {err}") from None
        for spec in self.charges:
            if spec.requires_p is not None and spec.requires_p != self.power:
                raise ConfigError(
                    f"charges: '{spec.name}' requires power {spec.requires_p:g}, "
                    f"config has {self.power:g}"
                )

    # -- initial data -------------------------------------------------------

    def initial_field(self) -> Field:
        init = _as_mapping(_need(self.raw, "init", ""), "init")
        kind = _need(init, "kind", "init")
        g = self.grid
        if kind == "soliton":
            return exact_soliton(
                float(_need(init, "eta", "init")),
                float(init.get("v", 0.0)),
                float(init.get("z0", 0.0)),
                float(init.get("phi0", 0.0)),
                0.0,
                g,
            )
        if kind == "ghw":
            return ghw_ansatz(
                g,
                float(_need(init, "eta", "init")),
                float(init.get("Z", 0.0)),
                float(init.get("V", 0.0)),
                float(init.get("phi", 0.0)),
                float(_need(init, "a", "init")),
                float(_need(init, "psi", "init")),
                float(_need(init, "gamma", "init")),
            )
        if kind == "file":
            path = Path(_need(init, "path", "init"))
            field = read_field_csv(path)
            if field.grid != g:
                raise ConfigError(
                    f"init.path: stored field grid {field.grid} does not match "
                    f"config grid {g}"
                )
            return field
        if kind == "profile":
            shape = _need(init, "shape", "init")
            amplitude = float(init.get("amplitude", 1.0))
            width = float(init.get("width", 1.0))
            center = float(init.get("center", 0.0))
            if shape == "sech":
                base = sech_profile(g, width, center)
            elif shape == "gaussian":
                base = gaussian_profile(g, width, center)
            elif shape == "random":
                base = random_localized(g, int(init.get("seed", self.seed)))
            else:
                raise ConfigError(f"init.shape: unknown profile '{shape}'")
            return amplitude * base
        raise ConfigError(f"init.kind: unknown kind '{kind}'")

    # -- manifolds ----------------------------------------------------------

    def manifold(self, section_name: str) -> AnsatzManifold:
        section = _as_mapping(_need(self.raw, section_name, ""), section_name)
        name = _need(section, "manifold", section_name)
        if name == "single_soliton":
            return single_soliton_manifold(self.grid)
        if name in ("ghw", "ghw_restricted"):
            gamma = float(_need(section, "gamma", section_name))
            return ghw_manifold(self.grid, gamma, restricted=(name == "ghw_restricted"))
        if name == "parabolic_plane":
            return parabolic_plane_manifold()
        if name in ("darboux2", "darboux4"):
            return darboux_manifold(1 if name == "darboux2" else 2)
        raise ConfigError(f"{section_name}.manifold: unknown manifold '{name}'")


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise ConfigError(f"cannot read config: {err}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"config is not valid JSON: {err}") from None
    return ExperimentConfig(raw)


def _resolve_output_dir(cfg: ExperimentConfig, override: str | None) -> Path:
    out = override or cfg.output_dir
    if out is None:
        raise ConfigError("missing required key 'output_dir' (or pass --output-dir)")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


# ---------------------------------------------------------------------------
# Subcommands


def run_evolve(cfg: ExperimentConfig, out: Path) -> int:
    if cfg.step is None:
        raise ConfigError("missing required key 'step'")
    u0 = cfg.initial_field()
    started = time.time()
    try:
        traj = evolve(u0, cfg.power, cfg.step)
    except BlowUpError as err:
        partial = err.trajectory
        serialize.write_trajectory_dir(partial, out / "trajectory")
        serialize.write_observables_csv(partial, cfg.charges, out / "observables.csv")
        serialize.write_manifest(
            out / "manifest.json",
            cfg.raw,
            __version__,
            time.time() - started,
            status="blowup",
            blowup_time=err.t_blowup,
            last_valid_time=float(partial.times[-1]),
        )
        print(f"blow-up detected near t = {err.t_blowup:.6g}; "
              f"last valid time {partial.times[-1]:.6g}", file=sys.stderr)
        return EXIT_NUMERICAL
    serialize.write_trajectory_dir(traj, out / "trajectory")
    serialize.write_observables_csv(traj, cfg.charges, out / "observables.csv")
    from .charges import drift_report

    rows = drift_report(traj, cfg.charges)
    serialize.write_drift_csv(rows, out / "drift.csv")
    serialize.write_drift_text(rows, out / "drift.txt")
    serialize.write_manifest(
        out / "manifest.json", cfg.raw, __version__, time.time() - started, status="ok"
    )
    return EXIT_OK


def run_scan(cfg: ExperimentConfig, out: Path) -> int:
    section = _as_mapping(_need(cfg.raw, "scan", ""), "scan")
    m = cfg.manifold("scan")

    def axis(key: str) -> tuple[str, float, float, int]:
        ax = _as_mapping(_need(section, key, "scan"), f"scan.{key}")
        return (
            str(_need(ax, "name", f"scan.{key}")),
            float(_need(ax, "lo", f"scan.{key}")),
            float(_need(ax, "hi", f"scan.{key}")),
            int(_need(ax, "n", f"scan.{key}")),
        )

    ax1, ax2 = axis("axis1"), axis("axis2")
    fixed = {k: float(v) for k, v in section.get("fixed", {}).items()}
    tol = float(section.get("tolerance", 1e-9))
    if m.name in ("ghw", "ghw_restricted"):
        gamma = float(section["gamma"])
        for nm, lo in ((ax1[0], ax1[1]), (ax2[0], ax2[1])):
            if nm == "a" and lo <= gamma:
                raise ConfigError(
                    f"scan.{nm}: axis reaches a = {lo:g} <= gamma = {gamma:g}, "
                    f"outside the ansatz domain"
                )
    started = time.time()
    try:
        result = degeneracy_scan(m, ax1, ax2, fixed, tol=tol)
    except ValueError as err:
        raise ConfigError(f"scan: {err}") from None
    serialize.write_scan_csv(result, out / "scan.csv")
    meta = serialize.scan_metadata(result, extra={k: v for k, v in section.items()
                                                  if k in ("gamma",)})
    serialize.atomic_write_text(
        out / "scan_meta.json", json.dumps(meta, indent=2, sort_keys=True, default=float) + "\n"
    )
    serialize.write_manifest(
        out / "manifest.json", cfg.raw, __version__, time.time() - started,
        status="ok", curve_count=result.curve_count,
    )
    return EXIT_OK


def run_effective(cfg: ExperimentConfig, out: Path) -> int:
    if cfg.step is None:
        raise ConfigError("missing required key 'step'")
    section = _as_mapping(_need(cfg.raw, "effective", ""), "effective")
    m = cfg.manifold("effective")
    theta0_cfg = _as_mapping(_need(section, "theta0", "effective"), "effective.theta0")
    try:
        theta0 = m.theta_from({k: float(v) for k, v in theta0_cfg.items()})
    except ValueError as err:
        raise ConfigError(f"effective.theta0: {err}") from None
    started = time.time()
    try:
        report = compare_with_pde(m, theta0, cfg.power, cfg.step)
    except (DegenerateOmegaError, DomainExitError) as err:
        serialize.write_effective_csv(err.states, m.param_names, out / "effective.csv")
        extra = {"status": "degenerate" if isinstance(err, DegenerateOmegaError) else "domain_exit",
                 "halt_theta": list(err.theta)}
        if isinstance(err, DegenerateOmegaError):
            extra["condition"] = err.condition
            extra["kernel_direction"] = list(err.kernel_direction)
        serialize.write_manifest(
            out / "manifest.json", cfg.raw, __version__, time.time() - started, **extra
        )
        print(str(err), file=sys.stderr)
        return EXIT_NUMERICAL
    serialize.write_effective_csv(report.effective_states, m.param_names, out / "effective.csv")
    serialize.write_comparison_csv(report, out / "comparison.csv")
    serialize.write_manifest(
        out / "manifest.json", cfg.raw, __version__, time.time() - started,
        status="ok", max_deviation=report.max_deviation,
    )
    return EXIT_OK


def run_charges(cfg: ExperimentConfig, out: Path) -> int:
    u = cfg.initial_field()
    started = time.time()
    rows = [["charge", "value"]]
    lines = []
    for spec in cfg.charges:
        val = spec.evaluate(u, 0.0, cfg.power)
        rows.append([spec.name, serialize.fmt(val)])
        lines.append(f"{spec.name} = {val:.17g}")
    import csv as _csv
    import io as _io

    buf = _io.StringIO()
    _csv.writer(buf, lineterminator="\n").writerows(rows)
    serialize.atomic_write_text(out / "charges.csv", buf.getvalue())
    serialize.write_manifest(
        out / "manifest.json", cfg.raw, __version__, time.time() - started, status="ok"
    )
    print("\n".join(lines))
    return EXIT_OK


def run_selftest() -> int:
    from .acceptance import run_all

    results = run_all()
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERICAL


# ---------------------------------------------------------------------------


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="nlslab",
        description="numerical laboratory for the 1-D focusing NLS",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("evolve", "scan", "effective", "charges"):
        p = sub.add_parser(name)
        p.add_argument("config", help="path to the JSON experiment config")
        p.add_argument("--output-dir", default=None, help="override config output_dir")
    sub.add_parser("selftest")

    args = parser.parse_args(argv)
    if args.command == "selftest":
        return run_selftest()

    try:
        cfg = load_config(args.config)
        out = _resolve_output_dir(cfg, args.output_dir)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG

    runner = {
        "evolve": run_evolve,
        "scan": run_scan,
        "effective": run_effective,
        "charges": run_charges,
    }[args.command]
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return runner(cfg, out)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
