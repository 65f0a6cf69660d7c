import json
import math
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coherent_zxz import cli, sweep
from coherent_zxz.sweep import (
    ConfigError,
    SweepMode,
    SweepTable,
    check_table,
    config_from_mapping,
    emit,
    load_config,
    parse_angle,
    parse_config_text,
    recipe_names,
    run_sweep,
)

PI = math.pi

SMALL = {
    "mode": "fidelity_vs_x",
    "path": "pi:1, pi:2, pi:2",
    "error": "pi:0.7, pi:0.3, pi:0.2",
    "start": "0",
    "stop": "1",
    "steps": "5",
    "outputs": "f_ori_analytic, f_ori_numeric",
}


def test_parse_angle():
    assert parse_angle("pi:0.8") == pytest.approx(0.8 * PI)
    assert parse_angle("pi:-0.5") == pytest.approx(-0.5 * PI)
    assert parse_angle("-pi:0.5") == pytest.approx(-0.5 * PI)
    assert parse_angle(" 1.25 ") == 1.25
    with pytest.raises(ValueError):
        parse_angle("pi")


def test_parse_config_text_comments():
    kv = parse_config_text("# header\nmode = fidelity_vs_x  # trailing\n\nSteps=3\n")
    assert kv == {"mode": "fidelity_vs_x", "steps": "3"}
    with pytest.raises(ConfigError, match="line 1"):
        parse_config_text("no equals sign")


def test_all_recipes_parse():
    names = recipe_names()
    for want in ["fig2a", "fig2b"] + [f"figS2{c}" for c in "abcdefghij"]:
        assert want in names
    for name in names:
        cfg = load_config(name)
        assert cfg.name == name


def test_fig_s2j_recipe_keeps_its_phi_scale():
    cfg = load_config("figS2j")
    assert cfg.path == pytest.approx((-PI, PI, 2 * PI))


@pytest.mark.parametrize(
    "change,field",
    [
        ({"mode": "banana"}, "mode"),
        ({"axis": "delta"}, "axis"),
        ({"steps": "1"}, "steps"),
        ({"steps": "three"}, "steps"),
        ({"start": "2"}, "start"),
        ({"outputs": "un_monte_carlo"}, "outputs"),
        ({"outputs": ""}, "outputs"),
        ({"error": "1, 2"}, "error"),
        ({"series": "0.1"}, "series"),
        ({"colour": "red"}, "colour"),
        ({"samples": "10"}, "samples"),
    ],
)
def test_config_errors_name_field(change, field):
    kv = {**SMALL, **change}
    with pytest.raises(ConfigError, match=f"^{field}"):
        config_from_mapping(kv)


def test_missing_field_named():
    kv = dict(SMALL)
    del kv["stop"]
    with pytest.raises(ConfigError, match="^stop"):
        config_from_mapping(kv)


def test_rows_and_columns():
    cfg = config_from_mapping(SMALL)
    t = run_sweep(cfg)
    assert t.columns == ("x", "f_ori_analytic", "f_ori_numeric")
    assert len(t.rows) == 5
    xs = t.column("x")
    assert np.all(np.diff(xs) > 0)
    assert all(len(r) == len(t.columns) for r in t.rows)


def test_series_columns_are_suffixed():
    cfg = config_from_mapping({**SMALL, "series": "0, 0; pi:0.1, pi:0.09"})
    t = run_sweep(cfg)
    assert t.columns == ("x", "f_ori_analytic_s1", "f_ori_numeric_s1", "f_ori_analytic_s2", "f_ori_numeric_s2")


def test_ideal_error_all_ones():
    cfg = config_from_mapping(
        {**SMALL, "error": "pi:0.5, 0, 0", "outputs": "f_ori_analytic, f_ori_numeric, f_ori_special, "
         "f_best_analytic, f_best_closed_form, un_analytic"}
    )
    t = run_sweep(cfg)
    for name in t.columns[1:]:
        np.testing.assert_allclose(t.column(name), 1.0, atol=1e-14)


@pytest.mark.parametrize("mode", [SweepMode.UNIVERSALITY_VS_DELTA, SweepMode.AVERAGE_FIDELITY_VS_DELTA])
def test_other_modes_run(mode):
    outputs = sweep.VALID_OUTPUTS[mode]
    cfg = config_from_mapping(
        {"mode": mode.value, "start": "pi:-0.2", "stop": "pi:0.2", "steps": "3",
         "outputs": ", ".join(outputs), "samples": "10000"}
    )
    t = run_sweep(cfg)
    assert t.columns == ("delta", *outputs)
    assert check_table(t) == []


def _table():
    return SweepTable(("x", "a", "b"), [(0.0, 1.0, 1 / 3), (0.5, math.pi, -1e-300), (1.0, 2.5e17, 0.1)])


def test_csv_layout():
    text = _table().to_csv()
    lines = text.split("\n")
    assert text.endswith("\n")
    assert len(text.splitlines()) == 4
    assert lines[0] == "x,a,b"
    assert lines[1].split(",")[2] == format(1 / 3, ".17g")


def test_empty_table_header_only(capsys):
    emit(SweepTable(("x", "a"), []), "csv")
    assert capsys.readouterr().out == "x,a\n"


def test_csv_and_json_round_trip():
    t = _table()
    assert SweepTable.from_csv(t.to_csv()) == t
    assert SweepTable.from_json(t.to_json(), t.columns) == t
    recs = json.loads(t.to_json())
    assert list(recs[0]) == list(t.columns)


finite = st.floats(allow_nan=False, allow_infinity=False)


@given(st.lists(st.tuples(finite, finite), max_size=8))
def test_round_trip_property(rows):
    t = SweepTable(("x", "y"), [tuple(r) for r in rows])
    assert SweepTable.from_csv(t.to_csv()) == t
    assert SweepTable.from_json(t.to_json(), t.columns) == t


def test_emit_rejects_format():
    with pytest.raises(ConfigError, match="^format"):
        emit(_table(), "xml")


def test_check_detects_disagreement():
    t = SweepTable(("x", "f_ori_analytic", "f_ori_numeric"), [(0.0, 1.0, 1.0), (1.0, 0.5, 0.5 + 2e-9)])
    bad = check_table(t)
    assert len(bad) == 1 and bad[0].column == "f_ori_analytic"
    t = SweepTable(("x", "f_best_analytic", "f_best_numeric"), [(0.0, 1.0, 1.0 - 5e-7)])
    assert check_table(t) == []


# ---------------------------------------------------------------------------
# command line


def run_cli(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_fidelity(capsys):
    code, out, _ = run_cli(["fidelity", "--target", "pi:0.95", "0", "0", "--error", "pi:0.6", "0", "0"], capsys)
    assert code == 0
    d = json.loads(out)
    assert d["case"] == "case1"
    assert d["f_ori_analytic"] == pytest.approx(d["f_ori_numeric"], abs=1e-12)
    assert d["coverable"] is False


def test_cli_decompose_and_mitigate(capsys):
    code, out, _ = run_cli(["decompose", "--target", "1", "2", "3"], capsys)
    assert code == 0 and json.loads(out)["distance_to_target"] < 1e-12
    args = ["mitigate", "--target", "pi:0.5", "1", "2", "--error", "pi:0.6", "0.3", "0.2"]
    code, out, _ = run_cli(args, capsys)
    assert code == 0 and json.loads(out)["achieved_fidelity"] == pytest.approx(1.0, abs=1e-12)
    code, out, _ = run_cli(args + ["--method", "numeric"], capsys)
    assert code == 0 and json.loads(out)["achieved_fidelity"] == pytest.approx(1.0, abs=1e-9)


def test_cli_universality(capsys):
    code, out, _ = run_cli(["universality", "--error", "pi:0.6", "0", "0", "--samples", "20000"], capsys)
    d = json.loads(out)
    assert code == 0
    assert d["un_analytic"] == pytest.approx(0.8)
    assert abs(d["un_monte_carlo"] - 0.8) < 4 * d["mc_stderr"]


@pytest.mark.parametrize(
    "argv",
    [
        ["fidelity", "--target", "1", "2"],
        ["fidelity", "--target", "x", "0", "0"],
        ["fidelity", "--target", "nan", "0", "0"],
        ["frobnicate"],
        ["sweep", "--recipe", "nope"],
        ["sweep"],
        ["sweep", "--recipe", "figS2a", "--set", "steps=1"],
        ["sweep", "--recipe", "figS2a", "--set", "steps"],
        ["universality", "--samples", "5"],
    ],
)
def test_cli_validation_exit_1(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        sys.exit(cli.main(argv))
    assert exc.value.code == 1
    assert capsys.readouterr().err


def test_cli_io_error_exit_2(tmp_path, capsys):
    code, _, err = run_cli(["sweep", "--recipe", "figS2a", "--set", "steps=3", "--out", str(tmp_path / "no" / "x.csv")], capsys)
    assert code == 2 and "I/O" in err
    code, _, _ = run_cli(["sweep", "--config", str(tmp_path / "missing.cfg")], capsys)
    assert code == 2


def test_cli_check_violation_exit_3(monkeypatch, capsys):
    real = sweep.original_fidelity_numeric
    monkeypatch.setattr(sweep, "original_fidelity_numeric", lambda p, e: real(p, e) + 1e-7)
    code, _, err = run_cli(["sweep", "--recipe", "figS2a", "--set", "steps=4", "--check"], capsys)
    assert code == 3
    assert "f_ori_analytic" in err or "f_ori_special" in err


def test_cli_check_passes(capsys):
    code, out, _ = run_cli(["sweep", "--recipe", "figS2f", "--set", "steps=4", "--check"], capsys)
    assert code == 0
    assert len(out.splitlines()) == 5


def test_cli_sweep_json_and_overrides(capsys):
    code, out, _ = run_cli(
        ["sweep", "--recipe", "fig2a", "--set", "steps=3", "--set", "outputs=f_best_analytic", "--format", "json"],
        capsys,
    )
    assert code == 0
    recs = json.loads(out)
    assert [r["delta"] for r in recs] == pytest.approx([-0.5 * PI, 0.0, 0.5 * PI], abs=1e-15)
    assert set(recs[0]) == {"delta", "f_best_analytic_s1", "f_best_analytic_s2"}


def test_cli_config_file(tmp_path, capsys):
    path = tmp_path / "c.cfg"
    path.write_text("\n".join(f"{k} = {v}" for k, v in SMALL.items()) + "\n")
    code, out, _ = run_cli(["sweep", "--config", str(path)], capsys)
    assert code == 0
    assert out.splitlines()[0] == "x,f_ori_analytic,f_ori_numeric"


def test_cli_output_dir_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(cli.OUTPUT_DIR_ENV, str(tmp_path / "out"))
    code, out, _ = run_cli(["sweep", "--recipe", "figS2b", "--set", "steps=3"], capsys)
    assert code == 0 and out == ""
    assert (tmp_path / "out" / "figS2b.csv").read_text().startswith("x,")
    code, out, _ = run_cli(["sweep", "--recipe", "figS2b", "--set", "steps=3", "--out", "-"], capsys)
    assert out.startswith("x,")


def test_cli_list_recipes(capsys):
    code, out, _ = run_cli(["sweep", "--list-recipes"], capsys)
    assert code == 0 and "figS2j" in out.split()


def test_rerun_byte_identical(tmp_path, capsys):
    argv = ["sweep", "--recipe", "fig2b", "--set", "steps=5"]
    outs = []
    for k in range(2):
        dest = tmp_path / f"run{k}.csv"
        assert cli.main(argv + ["--out", str(dest)]) == 0
        outs.append(dest.read_bytes())
    assert outs[0] == outs[1]


def test_console_script_entry_point():
    r = subprocess.run(
        [sys.executable, "-m", "coherent_zxz.cli", "fidelity", "--target", "1", "0", "0"],
        capture_output=True, text=True, check=False,
    )
    assert r.returncode == 0, r.stderr
    assert json.loads(r.stdout)["f_ori_analytic"] == pytest.approx(1.0)
