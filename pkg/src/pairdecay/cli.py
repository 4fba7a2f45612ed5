"""Scenario-driven command line: YAML config in, CSV/JSON/SVG files out.

One scenario per invocation.  Commands: trajectories, ensemble, regime,
imaging, energyshell.  Configs are strict: unknown keys are rejected by
name, required keys must be present, defaults fill the rest.  Outputs are
deterministic functions of (config, seed): CSV with 17 significant digits
and '.' decimal, JSON with sorted keys, SVG via the deterministic
renderer.

Exit codes: 0 success, 2 config error, 3 numeric/domain error,
4 resource exhaustion.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import energyshell, imaging, svgplot
from .ensemble import EnsembleSpec, collective_variance, write_variance_reports_json
from .errors import (ConfigError, DomainError, PairDecayError, ResourceError)
from .regime import RegimeInput, alignment_transition, parse_length
from .trajectories import (Trajectory, closed_form_from_state, integrate_pair,
                           write_trajectory_csv)
from .wavecore import DecayParams, PairState, make_pair_wave

COMMANDS = ("trajectories", "ensemble", "regime", "imaging", "energyshell")


@dataclass(frozen=True)
class ScenarioConfig:
    command: str
    params: dict
    out_dir: Path
    seed: int
    format: str
    emit_svg: bool


@dataclass(frozen=True)
class ExitReport:
    exit_code: int
    files_written: list


class _Key:
    def __init__(self, required=False, default=None, kind=float):
        self.required = required
        self.default = default
        self.kind = kind


def _coerce(name, value, kind):
    try:
        if kind is float:
            return float(value)
        if kind is int:
            out = int(value)
            if out != float(value):
                raise ValueError
            return out
        if kind is bool:
            if isinstance(value, bool):
                return value
            raise ValueError
        if kind == "length":
            return parse_length(value)
        if kind == "vec3":
            vec = [float(v) for v in value]
            if len(vec) != 3:
                raise ValueError
            return vec
        if kind == "floats":
            return [float(v) for v in value]
        if kind == "range2":
            pair = [float(v) for v in value]
            if len(pair) != 2:
                raise ValueError
            return pair
        if kind is dict:
            if not isinstance(value, dict):
                raise ValueError
            return dict(value)
        if kind is str:
            return str(value)
    except (TypeError, ValueError):
        raise ConfigError(f"key '{name}' has invalid value {value!r}")
    raise ConfigError(f"unhandled kind for key '{name}'")


_GLOBAL_KEYS = {
    "command": _Key(required=True, kind=str),
    "out_dir": _Key(default="./out", kind=str),
    "seed": _Key(default=0, kind=int),
    "format": _Key(default="csv", kind=str),
    "emit_svg": _Key(default=False, kind=bool),
}

_SCHEMAS = {
    "trajectories": {
        "alpha": _Key(required=True),
        "sigma": _Key(default=0.0),
        "m1": _Key(default=1.0),
        "m2": _Key(default=1.0),
        "r1": _Key(required=True, kind="vec3"),
        "r2": _Key(required=True, kind="vec3"),
        "t_end": _Key(required=True),
        "dt": _Key(required=True),
        "stride": _Key(default=1, kind=int),
    },
    "ensemble": {
        "alpha": _Key(required=True),
        "sigma": _Key(required=True),
        "m1": _Key(default=1.0),
        "m2": _Key(default=1.0),
        "n": _Key(required=True, kind=int),
        "times": _Key(required=True, kind="floats"),
    },
    "regime": {
        "L0": _Key(required=True, kind="length"),
        "wavelength": _Key(required=True, kind="length"),
    },
    "imaging": {
        "f": _Key(default=1.0),
        "S": _Key(default=None),
        "S_prime": _Key(default=None),
        "alpha": _Key(required=True),
        "sigma": _Key(required=True),
        "m1": _Key(default=1.0),
        "m2": _Key(default=1.0),
        "n": _Key(required=True, kind=int),
        "mask": _Key(required=True, kind=dict),
        "scan_bins": _Key(default=64, kind=int),
        "scan_range": _Key(default=None, kind="range2"),
        "decay_plane_frac": _Key(default=0.5),
        "n_paths": _Key(default=8, kind=int),
    },
    "energyshell": {
        "E_plus": _Key(default=0.02),
        "E_minus": _Key(default=None),
        "mu": _Key(default=0.5),
        "x_max": _Key(default=100.0),
        "n_points": _Key(default=2000, kind=int),
    },
}

_MASK_KEYS = {
    "shape": _Key(required=True, kind=str),
    "width": _Key(),
    "radius": _Key(),
    "separation": _Key(),
    "center": _Key(default=0.0),
    "plane_offset": _Key(default=0.0),
}


def _validate(table: dict, schema: dict, context: str) -> dict:
    out = {}
    for key, value in table.items():
        if key not in schema:
            raise ConfigError(f"unknown key '{key}' in {context}")
    for key, spec in schema.items():
        if key in table and table[key] is not None:
            out[key] = _coerce(key, table[key], spec.kind)
        elif spec.required:
            raise ConfigError(f"missing required key '{key}' in {context}")
        else:
            out[key] = spec.default
    return out


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a YAML scenario document."""
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}")
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping")
    command = raw.get("command")
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; expected one of {COMMANDS}")
    globals_in = {k: v for k, v in raw.items() if k in _GLOBAL_KEYS}
    rest = {k: v for k, v in raw.items() if k not in _GLOBAL_KEYS}
    g = _validate(globals_in, _GLOBAL_KEYS, "config")
    if g["format"] not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {g['format']!r}")
    params = _validate(rest, _SCHEMAS[command], f"command '{command}'")
    if command == "imaging":
        params["mask"] = _validate(params["mask"], _MASK_KEYS, "imaging mask")
    return ScenarioConfig(command=command, params=params, out_dir=Path(g["out_dir"]),
                          seed=g["seed"], format=g["format"], emit_svg=g["emit_svg"])


# -- output helpers ------------------------------------------------------------


def _write_table(path_base: Path, fmt: str, header: list[str], rows) -> Path:
    """Write a numeric table as CSV or JSON records with full precision."""
    if fmt == "csv":
        path = path_base.with_suffix(".csv")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for row in rows:
                writer.writerow([f"{v:.17g}" for v in row])
    else:
        path = path_base.with_suffix(".json")
        records = [dict(zip(header, [float(v) for v in row])) for row in rows]
        with open(path, "w") as fh:
            json.dump(records, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return path


def read_table_csv(path) -> tuple[list[str], np.ndarray]:
    """Read back a CSV written by this module (lossless round trip)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = np.array([[float(v) for v in row] for row in reader])
    return header, data


def _mask_from_config(cfg: dict) -> imaging.ApertureMask:
    shape_name = cfg["shape"]
    if shape_name == "slit":
        if cfg["width"] is None:
            raise ConfigError("slit mask needs 'width'")
        shape = imaging.Slit(width=cfg["width"])
    elif shape_name == "disk":
        if cfg["radius"] is None:
            raise ConfigError("disk mask needs 'radius'")
        shape = imaging.Disk(radius=cfg["radius"])
    elif shape_name == "double_slit":
        if cfg["width"] is None or cfg["separation"] is None:
            raise ConfigError("double_slit mask needs 'width' and 'separation'")
        shape = imaging.DoubleSlit(width=cfg["width"], separation=cfg["separation"])
    else:
        raise ConfigError(f"unknown mask shape {shape_name!r}")
    return imaging.ApertureMask(shape=shape, center=cfg["center"],
                                plane_offset=cfg["plane_offset"])


# -- command runners -----------------------------------------------------------


def _run_trajectories(config: ScenarioConfig) -> list[Path]:
    p = config.params
    params = DecayParams(m1=p["m1"], m2=p["m2"], alpha=p["alpha"], sigma=p["sigma"])
    wave = make_pair_wave(params)
    initial = PairState(np.array(p["r1"]), np.array(p["r2"]), 0.0)
    traj = integrate_pair(wave, initial, p["t_end"], p["dt"], stride=p["stride"])
    rows = [[traj.times[i], *traj.r1[i], *traj.r2[i]] for i in range(len(traj))]
    files = [_write_table(config.out_dir / "trajectory", config.format,
                          ["t", "r1x", "r1y", "r1z", "r2x", "r2y", "r2z"], rows)]
    if config.emit_svg:
        doc = svgplot.line_chart(
            [(traj.times, traj.r1[:, 0], "r1x"), (traj.times, traj.r2[:, 0], "r2x")],
            "t", "axial position")
        files.append(_write_text(config.out_dir / "trajectory.svg", doc))
    return files


def _run_ensemble(config: ScenarioConfig) -> list[Path]:
    p = config.params
    params = DecayParams(m1=p["m1"], m2=p["m2"], alpha=p["alpha"], sigma=p["sigma"])
    spec = EnsembleSpec(n=p["n"], seed=config.seed, params=params)
    reports = [collective_variance(spec, t) for t in p["times"]]
    path = config.out_dir / "ensemble.json"
    write_variance_reports_json(reports, path)
    files = [path]
    if config.emit_svg:
        ts = [r.t for r in reports]
        doc = svgplot.line_chart(
            [(ts, [r.analytic for r in reports], "analytic"),
             (ts, [r.empirical for r in reports], "empirical")],
            "t", "collective variance")
        files.append(_write_text(config.out_dir / "ensemble.svg", doc))
    return files


def _run_regime(config: ScenarioConfig) -> list[Path]:
    p = config.params
    report = alignment_transition(RegimeInput(source_width_L0=p["L0"],
                                              wavelength=p["wavelength"]))
    path = config.out_dir / "regime.json"
    with open(path, "w") as fh:
        json.dump(report.to_record(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return [path]


def _run_imaging(config: ScenarioConfig) -> list[Path]:
    p = config.params
    f = p["f"]
    S = p["S"] if p["S"] is not None else 2.0 * f
    lens = imaging.LensSetup(f=f, S=S, S_prime=p["S_prime"])
    mask = _mask_from_config(p["mask"])
    params = DecayParams(m1=p["m1"], m2=p["m2"], alpha=p["alpha"], sigma=p["sigma"])
    spec = EnsembleSpec(n=p["n"], seed=config.seed, params=params)
    scan_range = tuple(p["scan_range"]) if p["scan_range"] is not None else None
    image = imaging.ghost_image_scan(lens, mask, spec, scan_bins=p["scan_bins"],
                                     scan_range=scan_range,
                                     decay_plane_frac=p["decay_plane_frac"],
                                     collect_paths=p["n_paths"])
    rows = [[c, n] for c, n in zip(image.bin_centers, image.counts)]
    files = [_write_table(config.out_dir / "image", config.format,
                          ["bin_center", "counts"], rows)]
    if image.paths:
        path_rows = []
        for k, traj in enumerate(image.paths):
            for i in range(len(traj)):
                path_rows.append([k, traj.times[i], *traj.r1[i], *traj.r2[i]])
        files.append(_write_table(config.out_dir / "paths", config.format,
                                  ["path", "t", "r1x", "r1y", "r1z",
                                   "r2x", "r2y", "r2z"], path_rows))
    if config.emit_svg:
        files.append(_write_text(
            config.out_dir / "image.svg",
            svgplot.histogram_chart(image.bin_centers, image.counts,
                                    "scan coordinate", "coincidences")))
        if image.paths:
            axis = lens.axis
            e1, _ = imaging.transverse_basis(axis)
            panels = [(t.r1 @ axis, t.r1 @ e1, t.r2 @ axis, t.r2 @ e1)
                      for t in image.paths]
            files.append(_write_text(
                config.out_dir / "paths.svg",
                svgplot.trajectory_chart(panels, 0.0, "axial", "transverse")))
    return files


def _run_energyshell(config: ScenarioConfig) -> list[Path]:
    p = config.params
    e_minus = p["E_minus"] if p["E_minus"] is not None else 0.999 * p["E_plus"]
    band = energyshell.EnergyBand(E_plus=p["E_plus"], E_minus=e_minus, mu=p["mu"])
    xs = np.linspace(p["x_max"] / p["n_points"], p["x_max"], p["n_points"])
    profile = energyshell.g_profile(band, xs)
    files = [
        _write_table(config.out_dir / "fig2", config.format, ["x", "g"],
                     [[x, v] for x, v in zip(profile.xs, profile.values)]),
        _write_table(config.out_dir / "fig3", config.format, ["x", "g_squared"],
                     [[x, v * v] for x, v in zip(profile.xs, profile.values)]),
    ]
    if config.emit_svg:
        files.append(_write_text(
            config.out_dir / "fig2.svg",
            svgplot.line_chart([(profile.xs, profile.values)], "x [\u03bb_c]", "g(x)")))
        files.append(_write_text(
            config.out_dir / "fig3.svg",
            svgplot.line_chart([(profile.xs, profile.values**2)], "x [\u03bb_c]",
                               "g(x)\u00b2")))
    return files


def _write_text(path: Path, text: str) -> Path:
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path


_RUNNERS = {
    "trajectories": _run_trajectories,
    "ensemble": _run_ensemble,
    "regime": _run_regime,
    "imaging": _run_imaging,
    "energyshell": _run_energyshell,
}


def run_scenario(config: ScenarioConfig) -> ExitReport:
    """Execute the configured command, writing its declared output files."""
    config.out_dir.mkdir(parents=True, exist_ok=True)
    files = _RUNNERS[config.command](config)
    return ExitReport(exit_code=0, files_written=[str(f) for f in files])


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pairdecay",
        description="Run a decaying-pair simulation scenario from a YAML config.")
    parser.add_argument("--config", required=True, help="path to the scenario YAML")
    parser.add_argument("--out", default=None, help="output directory (overrides config)")
    parser.add_argument("--seed", type=int, default=None, help="RNG seed (overrides config)")
    parser.add_argument("--format", choices=("csv", "json"), default=None,
                        help="tabular output format (overrides config)")
    parser.add_argument("--svg", action="store_true", help="also write SVG charts")
    args = parser.parse_args(argv)

    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"ConfigError: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        config = parse_config(text)
        if args.out is not None:
            config = _replace(config, out_dir=Path(args.out))
        if args.seed is not None:
            config = _replace(config, seed=args.seed)
        if args.format is not None:
            config = _replace(config, format=args.format)
        if args.svg:
            config = _replace(config, emit_svg=True)
        report = run_scenario(config)
    except ConfigError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except ResourceError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 4
    except PairDecayError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    for f in report.files_written:
        print(f)
    return report.exit_code


def _replace(config: ScenarioConfig, **kw) -> ScenarioConfig:
    from dataclasses import replace
    return replace(config, **kw)


if __name__ == "__main__":
    sys.exit(main())
