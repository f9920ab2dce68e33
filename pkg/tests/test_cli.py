"""Command-line front end: exit codes, output formats, file handling."""

import json

import pytest

from ltmag import OutputTable, find_operating_point, preset, save_config
from ltmag.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _table(out):
    return OutputTable.from_csv(out)


def test_steady_state_stdout(capsys):
    code, out, err = _run(capsys, "steady-state", "--preset", "baseline",
                          "--delta", "1e8")
    assert code == 0 and err == ""
    table = _table(out)
    assert table.rows[0][table.column_index("n")] \
        == pytest.approx(6.681892e-2, rel=1e-6)
    assert table.rows[0][table.column_index("branch")] == "lasing"
    assert table.provenance["preset"] == "baseline"


def test_steady_state_json_format(capsys):
    code, out, _ = _run(capsys, "steady-state", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    names = [c["name"] for c in payload["columns"]]
    assert payload["rows"][0][names.index("n")] \
        == pytest.approx(4.161192e-3, rel=1e-6)


def test_steady_state_rejects_conflicting_bias(capsys):
    code, _, err = _run(capsys, "steady-state", "--delta", "1e8",
                        "--b-field", "1e-4")
    assert code == 1
    assert "either" in err


def test_set_override_changes_result(capsys):
    _, base_out, _ = _run(capsys, "steady-state", "--delta", "1e8")
    code, out, _ = _run(capsys, "steady-state", "--delta", "1e8",
                        "--set", "drive.pump12=2e6",
                        "--set", "drive.pump45=2e6")
    assert code == 0
    n_base = _table(base_out).rows[0][2]
    n_hot = _table(out).rows[0][2]
    assert n_hot > n_base


def test_config_file_input(tmp_path, capsys):
    path = tmp_path / "cfg.ini"
    save_config(preset("high_sensitivity"), path)
    code, out, _ = _run(capsys, "steady-state", "--config", str(path),
                        "--b-field", "164e-6")
    assert code == 0
    assert _table(out).rows[0][2] > 0.0


def test_missing_config_file(capsys):
    code, _, err = _run(capsys, "steady-state", "--config", "/nope.json")
    assert code == 1 and "cannot read config" in err


def test_unknown_subcommand(capsys):
    code, _, err = _run(capsys, "does-not-exist")
    assert code == 1 and err != ""


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0


def test_sweep_rows_and_out_file(tmp_path, capsys):
    out_path = tmp_path / "sweep.csv"
    code, out, _ = _run(capsys, "sweep", "--axis1",
                        "drive.delta:0:1e8:5", "--outputs", "n,branch",
                        "--serial", "--out", str(out_path))
    assert code == 0 and out == ""
    table = OutputTable.from_csv(out_path.read_text())
    assert len(table.rows) == 5
    assert table.rows[-1][table.column_index("branch")] == "lasing"


def test_sweep_bad_axis(capsys):
    code, _, err = _run(capsys, "sweep", "--axis1", "drive.delta:0:1e8")
    assert code == 1 and "axis" in err


def test_response_summary_and_timeseries(tmp_path, capsys):
    ts_path = tmp_path / "series.csv"
    code, out, _ = _run(capsys, "response", "--delta-before", "0",
                        "--delta-after", "1e8",
                        "--timeseries", str(ts_path))
    assert code == 0
    table = _table(out)
    row = table.rows[0]
    assert row[table.column_index("t_63")] \
        == pytest.approx(13.272e-6, rel=0.02)
    text = ts_path.read_text()
    header = [ln for ln in text.splitlines() if not ln.startswith("#")][0]
    assert header.split(",")[0] == "t"
    assert header.split(",")[-1] == "P_out_W"


def test_response_degenerate_is_physics_exit(capsys):
    code, _, err = _run(capsys, "response", "--delta-before", "1e8",
                        "--delta-after", "1e8")
    assert code == 3 and err != ""


def test_ac_command(capsys):
    code, out, _ = _run(capsys, "ac", "--preset", "high_sensitivity",
                        "--bias", "164e-6", "--amplitude", "1e-9",
                        "--omega", "2e5")
    assert code == 0
    table = _table(out)
    assert table.rows[0][table.column_index("n_signal")] \
        == pytest.approx(1.3764e-10, rel=0.01)


def test_sensitivity_dc_point_and_grid(capsys):
    code, out, _ = _run(capsys, "sensitivity-dc", "--preset",
                        "high_sensitivity", "--b-field", "164e-6")
    assert code == 0
    table = _table(out)
    assert table.rows[0][table.column_index("eta")] \
        == pytest.approx(1.1181e-15, rel=1e-3)
    code, out, _ = _run(capsys, "sensitivity-dc", "--preset",
                        "high_sensitivity", "--b-grid", "100e-6:300e-6:5")
    assert code == 0
    assert len(_table(out).rows) == 5


def test_sensitivity_dc_dark_is_physics_exit(capsys):
    code, _, err = _run(capsys, "sensitivity-dc", "--preset",
                        "high_sensitivity", "--b-field", "0")
    assert code == 3 and err != ""


def test_sensitivity_dc_needs_exactly_one_target(capsys):
    code, _, _ = _run(capsys, "sensitivity-dc")
    assert code == 1
    code, _, _ = _run(capsys, "sensitivity-dc", "--b-field", "1e-4",
                      "--b-grid", "0:1e-4:3")
    assert code == 1


def test_sensitivity_ac_quasistatic(capsys):
    code, out, _ = _run(capsys, "sensitivity-ac", "--preset",
                        "high_sensitivity", "--bias", "164e-6",
                        "--amplitude", "1e-9", "--omega", "2e5",
                        "--method", "ac_quasistatic")
    assert code == 0
    table = _table(out)
    assert table.rows[0][table.column_index("eta")] \
        == pytest.approx(1.7430e-15, rel=0.002)


def test_operating_point_command(capsys):
    code, out, _ = _run(capsys, "operating-point", "--preset", "baseline")
    assert code == 0
    table = _table(out)
    assert table.rows[0][table.column_index("pump")] \
        == pytest.approx(find_operating_point(preset("baseline")),
                         rel=1e-9)


def test_optimize_smoke(tmp_path, capsys):
    saved = tmp_path / "opt.json"
    code, out, _ = _run(capsys, "optimize", "--preset", "high_sensitivity",
                        "--vary", "pump", "--bounds-decades", "0.2",
                        "--b-min", "100e-6", "--b-max", "300e-6",
                        "--max-evaluations", "6",
                        "--save-config", str(saved))
    assert code == 0
    table = _table(out)
    assert table.rows[0][table.column_index("best_eta")] \
        <= table.rows[0][table.column_index("start_eta")]
    assert saved.exists()
    assert json.loads(saved.read_text())["drive"]["pump12"]["unit"] \
        == "rad/s"


def test_experiment_to_directory(tmp_path, capsys):
    out_dir = tmp_path / "results"
    code, out, _ = _run(capsys, "experiment", "--name", "fig1b",
                        "--out", str(out_dir))
    assert code == 0
    files = sorted(p.name for p in out_dir.iterdir())
    assert files == ["fig1b_detuned_100MHz.csv", "fig1b_on_resonance.csv"]
    table = OutputTable.from_csv((out_dir / files[1]).read_text())
    assert table.provenance["experiment"] == "fig1b"


def test_experiment_stdout_sections(capsys):
    code, out, _ = _run(capsys, "experiment", "--name", "fig1b")
    assert code == 0
    assert out.count("## ") == 2
