"""Config file round-trips, unit validation, overrides, digests."""

import dataclasses
import json

import pytest

from ltmag import (InvalidConfigError, apply_overrides, config_digest,
                   config_from_dict, config_to_dict, load_config, preset,
                   resolve_config, save_config)


@pytest.mark.parametrize("ext", ["json", "ini", "cfg", "txt"])
def test_save_load_round_trip(tmp_path, high_sens_config, ext):
    path = tmp_path / f"cfg.{ext}"
    save_config(high_sens_config, path)
    back = load_config(path)
    assert back == high_sens_config


def test_round_trip_preserves_override(tmp_path, baseline_config):
    cfg = dataclasses.replace(baseline_config, gain_coupling_override=2.5e8)
    for name in ("a.json", "a.ini"):
        path = tmp_path / name
        save_config(cfg, path)
        assert load_config(path).gain_coupling_override == 2.5e8


def test_dict_round_trip(baseline_config):
    assert config_from_dict(config_to_dict(baseline_config)) \
        == baseline_config


def test_unknown_extension_rejected(tmp_path, baseline_config):
    with pytest.raises(InvalidConfigError):
        save_config(baseline_config, tmp_path / "cfg.yaml")


def test_missing_file_rejected(tmp_path):
    with pytest.raises(InvalidConfigError):
        load_config(tmp_path / "nope.json")


def test_malformed_json_rejected(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(InvalidConfigError):
        load_config(path)


def test_wrong_unit_rejected(tmp_path, baseline_config):
    path = tmp_path / "cfg.json"
    save_config(baseline_config, path)
    data = json.loads(path.read_text())
    data["cavity"]["kappa"]["unit"] = "Hz"
    path.write_text(json.dumps(data))
    with pytest.raises(InvalidConfigError):
        load_config(path)


def test_unknown_field_rejected(tmp_path, baseline_config):
    path = tmp_path / "cfg.json"
    save_config(baseline_config, path)
    data = json.loads(path.read_text())
    data["cavity"]["finesse"] = {"value": 1.0, "unit": "1"}
    path.write_text(json.dumps(data))
    with pytest.raises(InvalidConfigError):
        load_config(path)


def test_ini_empty_value_rejected(tmp_path, baseline_config):
    path = tmp_path / "cfg.ini"
    save_config(baseline_config, path)
    text = path.read_text().replace("kappa = 3000000.0 rad/s", "kappa =")
    assert "kappa =\n" in text
    path.write_text(text)
    with pytest.raises(InvalidConfigError):
        load_config(path)


def test_overrides(baseline_config):
    cfg = apply_overrides(baseline_config, ["drive.omega=5e6",
                                            "cavity.kappa=4e6"])
    assert cfg.drive.omega == 5e6
    assert cfg.cavity.kappa == 4e6
    # the rest of the config is untouched
    assert cfg.rates == baseline_config.rates


def test_override_mode_and_gain(baseline_config):
    cfg = apply_overrides(baseline_config,
                          ["orientation.mode=four_orientation",
                           "gain.coupling_override=1e8"])
    assert cfg.orientation.mode == "four_orientation"
    assert cfg.gain_coupling_override == 1e8
    cleared = apply_overrides(cfg, ["gain.coupling_override=none"])
    assert cleared.gain_coupling_override is None


def test_override_mapping_form(baseline_config):
    cfg = apply_overrides(baseline_config, {"drive.delta": 1e8})
    assert cfg.drive.delta == 1e8


def test_override_rejects_bad_paths(baseline_config):
    for bad in ["omega=5e6", "drive.phase=1", "drive.omega", "drive.omega=x"]:
        with pytest.raises(InvalidConfigError):
            apply_overrides(baseline_config, [bad])


def test_digest_stable_and_sensitive(baseline_config):
    d1 = config_digest(baseline_config)
    d2 = config_digest(preset("baseline"))
    assert d1 == d2
    assert len(d1) == 64
    changed = apply_overrides(baseline_config, ["drive.omega=5e6"])
    assert config_digest(changed) != d1


def test_resolve_config_precedence(tmp_path, high_sens_config):
    path = tmp_path / "cfg.json"
    save_config(high_sens_config, path)
    cfg = resolve_config(None, str(path), ["drive.omega=1e6"])
    assert cfg.cavity.kappa == high_sens_config.cavity.kappa
    assert cfg.drive.omega == 1e6
    assert resolve_config(None, None) == preset("baseline")
    assert resolve_config("high_sensitivity", None) == high_sens_config
    with pytest.raises(InvalidConfigError):
        resolve_config("baseline", str(path))
