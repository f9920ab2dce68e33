"""Configuration files, overrides, and provenance digests.

Two on-disk formats carry the same schema:

* an INI-style text format where each physical value is written as
  ``number unit`` (``kappa = 3e6 rad/s``), dimensionless values as bare
  numbers, and
* a JSON mirror where each physical value is ``{"value": x, "unit": u}``.

Units are fixed per field and validated on read; a config written with
the wrong unit string is rejected rather than converted.  Overrides use
dotted paths matching the section names (``drive.omega=3.67e6``).
"""

from __future__ import annotations

import configparser
import dataclasses
import hashlib
import io
import json
import os

from .constants import PhysicalConstants
from .errors import InvalidConfigError
from .model import (CavityGeometry, DriveSettings, LevelRates, ModelConfig,
                    OrientationModel, preset)

# (section, field) -> unit string; None marks dimensionless numbers and
# "str" marks plain tokens.
_SCHEMA: dict[str, dict[str, str | None]] = {
    "rates": {name: "rad/s" for name in
              ("L21", "L23", "L31", "L54", "L56", "L64",
               "L57", "L71", "L74", "L27", "gamma14")},
    "cavity": {
        "kappa": "rad/s",
        "medium_volume": "m^3",
        "cavity_volume": "m^3",
        "nv_concentration": None,
        "nv_fraction": None,
        "vacuum_wavelength": "m",
        "refractive_index": None,
        "emission_bandwidth": "Hz",
    },
    "drive": {
        "pump12": "rad/s",
        "pump45": "rad/s",
        "omega": "rad/s",
        "delta": "rad/s",
    },
    "orientation": {
        "mode": "str",
        "aligned_fraction": None,
        "off_axis_detuning": "rad/s",
    },
    "constants": {
        "hbar": "J s",
        "h": "J s",
        "c": "m/s",
        "mu_bohr": "J/T",
        "g_electron": None,
        "carbon_site_density": "1/m^3",
    },
    "gain": {
        "coupling_override": "rad/s",
    },
}

_SECTION_TYPES = {
    "rates": LevelRates,
    "cavity": CavityGeometry,
    "drive": DriveSettings,
    "orientation": OrientationModel,
    "constants": PhysicalConstants,
}

_SECTION_ATTR = {
    "rates": "rates",
    "cavity": "cavity",
    "drive": "drive",
    "orientation": "orientation",
    "constants": "constants",
}


def config_to_dict(config: ModelConfig) -> dict:
    """JSON-ready nested dict with explicit units."""
    out: dict = {}
    for section, fields in _SCHEMA.items():
        if section == "gain":
            override = config.gain_coupling_override
            out["gain"] = {
                "coupling_override": None if override is None
                else {"value": override, "unit": "rad/s"}}
            continue
        part = getattr(config, _SECTION_ATTR[section])
        sec: dict = {}
        for name, unit in fields.items():
            value = getattr(part, name)
            if unit == "str":
                sec[name] = value
            elif unit is None:
                sec[name] = {"value": float(value), "unit": "1"}
            else:
                sec[name] = {"value": float(value), "unit": unit}
        out[section] = sec
    return out


def _parse_value(section: str, name: str, payload) -> object:
    unit = _SCHEMA[section][name]
    if unit == "str":
        if not isinstance(payload, str):
            raise InvalidConfigError(
                f"{section}.{name} must be a plain string")
        return payload
    if not isinstance(payload, dict) or set(payload) != {"value", "unit"}:
        raise InvalidConfigError(
            f"{section}.{name} must be {{'value': x, 'unit': u}}")
    expected = "1" if unit is None else unit
    if payload["unit"] != expected:
        raise InvalidConfigError(
            f"{section}.{name}: unit must be {expected!r}, "
            f"got {payload['unit']!r}")
    try:
        return float(payload["value"])
    except (TypeError, ValueError) as exc:
        raise InvalidConfigError(
            f"{section}.{name}: bad numeric value "
            f"{payload['value']!r}") from exc


def config_from_dict(data: dict) -> ModelConfig:
    if not isinstance(data, dict):
        raise InvalidConfigError("config document must be an object")
    unknown = set(data) - set(_SCHEMA)
    if unknown:
        raise InvalidConfigError(f"unknown config sections: {sorted(unknown)}")
    for required in ("rates", "cavity", "drive"):
        if required not in data:
            raise InvalidConfigError(f"missing config section [{required}]")
    parts = {}
    for section, cls in _SECTION_TYPES.items():
        if section not in data:
            continue
        sec = data[section]
        known = _SCHEMA[section]
        bad = set(sec) - set(known)
        if bad:
            raise InvalidConfigError(
                f"unknown fields in [{section}]: {sorted(bad)}")
        missing = set(known) - set(sec)
        if missing and section in ("rates", "cavity", "drive"):
            raise InvalidConfigError(
                f"missing fields in [{section}]: {sorted(missing)}")
        kwargs = {name: _parse_value(section, name, sec[name])
                  for name in sec}
        parts[_SECTION_ATTR[section]] = cls(**kwargs)
    override = None
    if "gain" in data:
        payload = data["gain"].get("coupling_override")
        if payload is not None:
            override = _parse_value("gain", "coupling_override", payload)
    return ModelConfig(gain_coupling_override=override, **parts)


def _ini_dump(config: ModelConfig) -> str:
    doc = config_to_dict(config)
    parser = configparser.ConfigParser()
    parser.optionxform = str  # keep field-name case
    for section, sec in doc.items():
        parser[section] = {}
        for name, payload in sec.items():
            if payload is None:
                parser[section][name] = "none"
            elif isinstance(payload, str):
                parser[section][name] = payload
            elif payload["unit"] == "1":
                parser[section][name] = repr(payload["value"])
            else:
                parser[section][name] = (
                    f"{payload['value']!r} {payload['unit']}")
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


def _ini_parse(text: str) -> ModelConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise InvalidConfigError(f"malformed config file: {exc}") from exc
    doc: dict = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise InvalidConfigError(f"unknown config section [{section}]")
        sec: dict = {}
        for name, raw in parser[section].items():
            if name not in _SCHEMA[section]:
                raise InvalidConfigError(
                    f"unknown field {name!r} in [{section}]")
            unit = _SCHEMA[section][name]
            raw = raw.strip()
            if unit == "str":
                sec[name] = raw
                continue
            if section == "gain" and raw.lower() == "none":
                sec[name] = None
                continue
            pieces = raw.split()
            if not pieces:
                raise InvalidConfigError(f"{section}.{name}: empty value")
            if len(pieces) == 1:
                value_str, unit_str = pieces[0], "1"
            else:
                value_str = pieces[0]
                unit_str = " ".join(pieces[1:])
            try:
                value = float(value_str)
            except ValueError as exc:
                raise InvalidConfigError(
                    f"{section}.{name}: bad number {value_str!r}") from exc
            sec[name] = {"value": value, "unit": unit_str}
        doc[section] = sec
    return config_from_dict(doc)


def save_config(config: ModelConfig, path: str | os.PathLike,
                fmt: str | None = None) -> None:
    fmt = fmt or _format_for(path)
    if fmt == "json":
        text = json.dumps(config_to_dict(config), indent=2, sort_keys=True)
        text += "\n"
    elif fmt == "ini":
        text = _ini_dump(config)
    else:
        raise InvalidConfigError(f"unknown config format {fmt!r}")
    with open(path, "w", encoding="utf-8") as fp:
        fp.write(text)


def load_config(path: str | os.PathLike,
                fmt: str | None = None) -> ModelConfig:
    fmt = fmt or _format_for(path)
    try:
        with open(path, "r", encoding="utf-8") as fp:
            text = fp.read()
    except OSError as exc:
        raise InvalidConfigError(f"cannot read config: {exc}") from exc
    if fmt == "json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidConfigError(f"malformed JSON config: {exc}") from exc
        return config_from_dict(data)
    if fmt == "ini":
        return _ini_parse(text)
    raise InvalidConfigError(f"unknown config format {fmt!r}")


def _format_for(path: str | os.PathLike) -> str:
    ext = os.path.splitext(os.fspath(path))[1].lower()
    if ext == ".json":
        return "json"
    if ext in (".ini", ".cfg", ".conf", ".txt"):
        return "ini"
    raise InvalidConfigError(
        f"cannot infer config format from extension {ext!r}; "
        "use .json or .ini/.cfg/.conf/.txt")


def apply_overrides(config: ModelConfig, overrides) -> ModelConfig:
    """Apply ``section.field=value`` overrides (strings or a mapping)."""
    if isinstance(overrides, dict):
        items = list(overrides.items())
    else:
        items = []
        for entry in overrides:
            if "=" not in entry:
                raise InvalidConfigError(
                    f"override {entry!r} must look like section.field=value")
            key, _, value = entry.partition("=")
            items.append((key.strip(), value.strip()))
    cfg = config
    for key, value in items:
        cfg = _apply_one(cfg, key, value)
    return cfg


def _apply_one(config: ModelConfig, key: str, value) -> ModelConfig:
    if "." not in key:
        raise InvalidConfigError(
            f"override path {key!r} must be section.field")
    section, _, name = key.partition(".")
    if section not in _SCHEMA or name not in _SCHEMA[section]:
        raise InvalidConfigError(f"unknown override path {key!r}")
    unit = _SCHEMA[section][name]
    if section == "gain":
        if isinstance(value, str) and value.lower() == "none":
            return dataclasses.replace(config, gain_coupling_override=None)
        return dataclasses.replace(config,
                                   gain_coupling_override=_as_float(key,
                                                                    value))
    attr = _SECTION_ATTR[section]
    part = getattr(config, attr)
    if unit == "str":
        new_part = dataclasses.replace(part, **{name: str(value)})
    else:
        new_part = dataclasses.replace(part,
                                       **{name: _as_float(key, value)})
    return dataclasses.replace(config, **{attr: new_part})


def _as_float(key: str, value) -> float:
    try:
        return float(value)
    except (TypeError, ValueError) as exc:
        raise InvalidConfigError(
            f"override {key}: bad number {value!r}") from exc


def config_digest(config: ModelConfig) -> str:
    """Stable content hash of the physical configuration.

    Changes exactly when a parameter changes; safe to embed in output
    provenance (no timestamps, no environment state).
    """
    canonical = json.dumps(config_to_dict(config), sort_keys=True,
                           separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def resolve_config(preset_name: str | None, config_path: str | None,
                   overrides=()) -> ModelConfig:
    """Preset or file, then overrides; used by the command-line front end."""
    if preset_name and config_path:
        raise InvalidConfigError("give either a preset or a config file")
    if config_path:
        cfg = load_config(config_path)
    else:
        cfg = preset(preset_name or "baseline")
    if overrides:
        cfg = apply_overrides(cfg, overrides)
    return cfg
