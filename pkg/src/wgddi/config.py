"""Reading and writing chain configuration files.

Schema (JSON or YAML, chosen by file extension)::

    waveguide:
      lambda_guided_nm: 211.8
      lambda_transition_nm: 655.0
      propagation_axis: [1, 0, 0]
    dipole:
      direction: [0, -1, 0]
    emitters:
      - {position_nm: [0, 17, 0], gamma_wg: 11.03, gamma_loss: 6.86}
    ddi:
      enabled: true
      override: [[0, 7], [7, 0]]   # optional

Rates are in units of Gamma0, lengths in nm.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any

import yaml

from .core import ChainConfig, ConfigError, DipoleOrientation, Emitter, WaveguideParams, validate_chain

YAML_SUFFIXES = {".yaml", ".yml"}


class ConfigParseError(ConfigError):
    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.line = line
        self.field = field


def _require(mapping: Any, key: str, path: str):
    if not isinstance(mapping, dict):
        raise ConfigParseError("expected a mapping", field=path or "<root>")
    if key not in mapping:
        raise ConfigParseError("missing required field", field=f"{path}.{key}" if path else key)
    return mapping[key]


def config_from_dict(data: Any) -> ChainConfig:
    """Build and validate a chain from the schema above."""
    wg = _require(data, "waveguide", "")
    dip = data.get("dipole", {"direction": [0.0, -1.0, 0.0]})
    emitters_raw = _require(data, "emitters", "")
    ddi = data.get("ddi", {}) or {}
    if not isinstance(emitters_raw, list):
        raise ConfigParseError("expected a list", field="emitters")

    def build(path, factory, *args, **kwargs):
        try:
            return factory(*args, **kwargs)
        except ConfigError as exc:
            raise type(exc)(f"field '{path}': {exc}") from exc
        except (TypeError, ValueError) as exc:
            raise ConfigParseError(str(exc), field=path) from exc

    waveguide = build(
        "waveguide",
        WaveguideParams,
        lambda_guided=_require(wg, "lambda_guided_nm", "waveguide"),
        lambda_transition=_require(wg, "lambda_transition_nm", "waveguide"),
        propagation_axis=wg.get("propagation_axis", [1.0, 0.0, 0.0]),
    )
    dipole = build("dipole.direction", DipoleOrientation, _require(dip, "direction", "dipole"))
    emitters = []
    for i, raw in enumerate(emitters_raw):
        path = f"emitters[{i}]"
        emitters.append(
            build(
                path,
                Emitter,
                position=_require(raw, "position_nm", path),
                gamma_wg=_require(raw, "gamma_wg", path),
                gamma_loss=raw.get("gamma_loss", 0.0),
            )
        )
    if not isinstance(ddi, dict):
        raise ConfigParseError("expected a mapping", field="ddi")
    enabled = ddi.get("enabled", True)
    if not isinstance(enabled, bool):
        raise ConfigParseError("expected true or false", field="ddi.enabled")
    config = build(
        "ddi.override",
        ChainConfig,
        emitters=emitters,
        waveguide=waveguide,
        dipole=dipole,
        ddi_override=ddi.get("override"),
        ddi_enabled=enabled,
    )
    return validate_chain(config)


def config_to_dict(config: ChainConfig) -> dict:
    out = {
        "waveguide": {
            "lambda_guided_nm": config.waveguide.lambda_guided,
            "lambda_transition_nm": config.waveguide.lambda_transition,
            "propagation_axis": list(config.waveguide.propagation_axis),
        },
        "dipole": {"direction": list(config.dipole.direction)},
        "emitters": [
            {"position_nm": list(e.position), "gamma_wg": e.gamma_wg, "gamma_loss": e.gamma_loss}
            for e in config.emitters
        ],
        "ddi": {"enabled": config.ddi_enabled},
    }
    if config.ddi_override is not None:
        out["ddi"]["override"] = [list(row) for row in config.ddi_override]
    return out


def parse_config(text: str, fmt: str = "json") -> ChainConfig:
    if fmt == "yaml":
        try:
            data = yaml.safe_load(text)
        except yaml.MarkedYAMLError as exc:
            line = exc.problem_mark.line + 1 if exc.problem_mark else None
            raise ConfigParseError(f"invalid YAML: {exc.problem}", line=line) from exc
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc
    return config_from_dict(data)


def _format_for(path: Path) -> str:
    return "yaml" if path.suffix.lower() in YAML_SUFFIXES else "json"


def load_config(path) -> ChainConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigParseError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_config(text, _format_for(path))


def dump_config(config: ChainConfig, path) -> None:
    path = Path(path)
    data = config_to_dict(config)
    if _format_for(path) == "yaml":
        path.write_text(yaml.safe_dump(data, sort_keys=False))
    else:
        path.write_text(json.dumps(data, indent=2) + "\n")


def canonical_json(config: ChainConfig) -> str:
    return json.dumps(config_to_dict(config), sort_keys=True, separators=(",", ":"))


def config_digest(config: ChainConfig) -> str:
    """Content hash of the resolved (validated) configuration."""
    return "sha256:" + hashlib.sha256(canonical_json(config).encode()).hexdigest()
