"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 geometry error,
4 numerical error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    SingularPhase,
    Spectrum,
    estimate_ddi_from_fano,
    find_features,
    spectrum_on_grid,
    sweep_map,
)
from .config import (
    ConfigParseError,
    canonical_json,
    config_digest,
    config_from_dict,
    dump_config,
    load_config,
)
from .core import ChainConfig, ConfigError, GeometryError, NumericalError
from .ddi import build_ddi_matrix
from .presets import PRESETS, preset
from .scattering import asymmetric_amplitudes, gap_phases, single_emitter_amplitudes

EXIT_CONFIG = 2
EXIT_GEOMETRY = 3
EXIT_NUMERICAL = 4
SPECTRUM_COLUMNS = ["delta", "reflection", "transmission", "loss"]
MAP_COLUMNS = ["kl", "delta", "reflection"]


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_CONFIG):
        super().__init__(message)
        self.code = code


def fmt(value: float) -> str:
    return format(float(value), ".12g")


def _header(kind: str, config: ChainConfig, command: str) -> list[str]:
    return [
        f"# wgddi {kind}",
        f"# tool_version: {__version__}",
        f"# config_digest: {config_digest(config)}",
        f"# command: {command}",
        f"# config: {canonical_json(config)}",
    ]


def _write_manifest(out: Path, config: ChainConfig, command: dict) -> Path:
    manifest = {
        "config_digest": config_digest(config),
        "command": command,
        "tool_version": __version__,
        "outputs": [str(out)],
        "config": json.loads(canonical_json(config)),
    }
    path = out.with_name(out.name + ".manifest.json")
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _without_ddi(config: ChainConfig) -> ChainConfig:
    return replace(config, ddi_enabled=False, ddi_override=None)


def closed_form_spectrum(config: ChainConfig, deltas: np.ndarray) -> Spectrum:
    """Spectrum from the analytic one- and two-emitter amplitudes."""
    em = config.emitters
    if config.n == 1:
        t, r = single_emitter_amplitudes(deltas, em[0].gamma_wg, em[0].gamma_loss)
    elif config.n == 2:
        omega = build_ddi_matrix(config)[0, 1]
        kl = gap_phases(config)[0]
        t, r = asymmetric_amplitudes(
            deltas, em[0].gamma_wg, em[0].gamma_loss, em[1].gamma_wg, em[1].gamma_loss, kl, omega
        )
    else:
        raise CliError(f"--closed-form supports at most 2 emitters, chain has {config.n}")
    return Spectrum(deltas, np.abs(r) ** 2, np.abs(t) ** 2)


def cmd_preset(args) -> int:
    try:
        config = preset(args.name)
    except KeyError as exc:
        raise CliError(exc.args[0]) from None
    if args.output:
        dump_config(config, args.output)
    else:
        sys.stdout.write(json.dumps(json.loads(canonical_json(config)), indent=2) + "\n")
    return 0


def cmd_ddi(args) -> int:
    config = load_config(args.config)
    omega = build_ddi_matrix(config)
    width = max(len(fmt(v)) for v in omega.flat) + 2
    for row in omega:
        print("".join(fmt(v).rjust(width) for v in row))
    report = {
        "units": "Gamma0",
        "config_digest": config_digest(config),
        "omega": omega.tolist(),
    }
    if args.json:
        Path(args.json).write_text(json.dumps(report, indent=2) + "\n")
    return 0


def cmd_spectrum(args) -> int:
    config = load_config(args.config)
    if args.no_ddi:
        config = _without_ddi(config)
    if not args.delta_min < args.delta_max:
        raise CliError("--delta-min must be smaller than --delta-max")
    if args.points < 2:
        raise CliError("--points must be at least 2")
    deltas = np.linspace(args.delta_min, args.delta_max, args.points)
    if args.closed_form:
        spectrum = closed_form_spectrum(config, deltas)
    else:
        spectrum = spectrum_on_grid(config, build_ddi_matrix(config), deltas)

    route = "closed-form" if args.closed_form else "solver"
    command = {
        "name": "spectrum",
        "delta_min": args.delta_min,
        "delta_max": args.delta_max,
        "n_points": args.points,
        "ddi": not args.no_ddi,
        "route": route,
    }
    summary = " ".join(f"{k}={v}" for k, v in command.items() if k != "name")
    lines = _header("spectrum", config, f"spectrum {summary}")
    lines.append(",".join(SPECTRUM_COLUMNS))
    for row in zip(spectrum.deltas, spectrum.reflection, spectrum.transmission, spectrum.loss):
        lines.append(",".join(fmt(v) for v in row))
    out = Path(args.output)
    out.write_text("\n".join(lines) + "\n")
    _write_manifest(out, config, command)
    return 0


def read_spectrum_csv(path) -> tuple[Spectrum, dict]:
    """Parse a spectrum CSV written by ``cmd_spectrum``.

    Returns the spectrum and the ``key: value`` pairs of the comment header.
    """
    meta = {}
    rows = []
    header = None
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].strip().partition(":")
            if sep:
                meta[key.strip()] = value.strip()
            continue
        fields = next(csv.reader([line]))
        if header is None:
            if fields != SPECTRUM_COLUMNS:
                raise CliError(f"line {lineno}: expected columns {','.join(SPECTRUM_COLUMNS)}")
            header = fields
            continue
        if len(fields) != len(SPECTRUM_COLUMNS):
            raise CliError(f"line {lineno}: expected {len(SPECTRUM_COLUMNS)} values")
        try:
            rows.append([float(v) for v in fields])
        except ValueError:
            raise CliError(f"line {lineno}: non-numeric value") from None
    if header is None or not rows:
        raise CliError(f"{path}: no spectrum data")
    data = np.array(rows)
    if np.any(np.diff(data[:, 0]) <= 0):
        raise CliError(f"{path}: detuning column must be strictly increasing")
    return Spectrum(data[:, 0], data[:, 1], data[:, 2]), meta


def _ddi_estimate(features, meta: dict):
    if "config" not in meta or not features.minima:
        return None
    try:
        config = config_from_dict(json.loads(meta["config"]))
    except (ValueError, ConfigError):
        return None
    if config.n != 2 or config.emitters[0].gamma_wg != config.emitters[1].gamma_wg:
        return None
    gamma = config.emitters[0].gamma_wg
    kl = float(gap_phases(config)[0])
    delta_rmin, depth = min(features.minima, key=lambda m: m[1])
    try:
        omega = estimate_ddi_from_fano(delta_rmin, gamma, kl)
    except SingularPhase:
        return None
    lossless = bool(np.all(config.gamma_loss == 0))
    return {
        "omega": omega,
        "delta_rmin": delta_rmin,
        "reflection_at_min": depth,
        "gamma_wg": gamma,
        "kl": kl,
        "lossless": lossless,
        "caveat": None if lossless else "non-zero loss shifts the Fano minimum; estimate is approximate",
    }


def cmd_features(args) -> int:
    spectrum, meta = read_spectrum_csv(args.spectrum)
    if not 0 < args.threshold < 1:
        raise CliError("--threshold must lie in (0, 1)")
    features = find_features(spectrum, args.threshold)
    report = {
        "threshold": features.threshold,
        "peaks": [{"delta": d, "reflection": r} for d, r in features.peaks],
        "minima": [{"delta": d, "reflection": r} for d, r in features.minima],
        "bandwidth": features.bandwidth,
        "flag": features.flag,
    }
    if "config_digest" in meta:
        report["config_digest"] = meta["config_digest"]
    estimate = _ddi_estimate(features, meta)
    if estimate is not None:
        report["ddi_estimate"] = estimate
    text = json.dumps(report, indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def parse_grid(spec: str, name: str) -> np.ndarray:
    """``start:stop:num`` or a single value."""
    parts = spec.split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) == 3:
            start, stop, num = float(parts[0]), float(parts[1]), int(parts[2])
            if num < 1:
                raise ValueError
            return np.linspace(start, stop, num)
    except ValueError:
        pass
    raise CliError(f"{name}: expected 'start:stop:num' or a single number, got {spec!r}")


def cmd_map(args) -> int:
    config = load_config(args.config)
    deltas = parse_grid(args.delta_grid, "--delta-grid")
    kls = parse_grid(args.kl_grid, "--kl-grid")
    if args.kl_units == "pi":
        kls = kls * np.pi
    ddi = not args.no_ddi
    if not ddi:
        config = _without_ddi(config)
    result = sweep_map(config, deltas, kls, ddi_enabled=ddi)

    command = {
        "name": "map",
        "delta_grid": args.delta_grid,
        "kl_grid": args.kl_grid,
        "kl_units": args.kl_units,
        "ddi": ddi,
    }
    summary = " ".join(f"{k}={v}" for k, v in command.items() if k != "name")
    lines = _header("map", config, f"map {summary}")
    lines.append("# kl column in radians")
    lines.append(",".join(MAP_COLUMNS))
    for kl, row in zip(result.kl, result.reflection):
        lines.extend(f"{fmt(kl)},{fmt(d)},{fmt(r)}" for d, r in zip(result.deltas, row))
    out = Path(args.output)
    out.write_text("\n".join(lines) + "\n")
    _write_manifest(out, config, command)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wgddi",
        description="Single-photon transport through a waveguide coupled to an emitter chain.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preset", help="write a built-in configuration")
    p.add_argument("name", help=f"one of: {', '.join(PRESETS)}")
    p.add_argument("-o", "--output", help="config file (.json/.yaml); stdout if omitted")
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("ddi", help="print the DDI matrix in units of Gamma0")
    p.add_argument("config")
    p.add_argument("--json", metavar="PATH", help="also write the matrix as JSON")
    p.set_defaults(func=cmd_ddi)

    p = sub.add_parser("spectrum", help="reflection/transmission spectrum as CSV")
    p.add_argument("config")
    p.add_argument("--delta-min", type=float, default=-80.0)
    p.add_argument("--delta-max", type=float, default=80.0)
    p.add_argument("--points", type=int, default=2001)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--no-ddi", action="store_true", help="switch off direct DDI")
    p.add_argument("--closed-form", action="store_true", help="analytic amplitudes (N <= 2)")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("features", help="peaks, minima and bandwidth of a spectrum CSV")
    p.add_argument("spectrum")
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("-o", "--output", help="JSON report; stdout if omitted")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("map", help="reflection over a (kL, detuning) grid as long-form CSV")
    p.add_argument("config")
    p.add_argument("--delta-grid", default="-80:80:401", help="start:stop:num in Gamma0")
    p.add_argument("--kl-grid", default="0.1:2:96", help="start:stop:num")
    p.add_argument("--kl-units", choices=["pi", "rad"], default="pi")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--no-ddi", action="store_true")
    p.set_defaults(func=cmd_map)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GeometryError as exc:
        print(f"geometry error: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
