import csv
import io
import json
import math

import jsonschema
import pytest

from levyq.cli import run

import importlib.resources as resources


def _schema(name):
    with resources.files("levyq.schemas").joinpath(name).open("r") as fh:
        return json.load(fh)


def _run(capsys, *argv):
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_dist_self_representable_zero(capsys):
    code, out, err = _run(capsys, "dist", "--spec", "two_point(1/2)", "--atoms",
                          '{"atoms": [{"x": -1, "p": 0.5}, {"x": 1, "p": 0.5}]}')
    assert code == 0
    assert json.loads(out)["distance"] == 0.0
    assert "distance" in err  # human summary goes to stderr


def test_best_emits_schema_valid_json(capsys):
    code, out, _ = _run(capsys, "best", "--spec", "exp(1)", "--n", "4")
    assert code == 0
    blob = json.loads(out)
    jsonschema.validate(blob, _schema("approx_result.schema.json"))
    assert 4 * blob["error"] == pytest.approx(0.34595, abs=1e-4)


def test_uniform_emits_schema_valid_json(capsys):
    code, out, _ = _run(capsys, "uniform", "--spec", "exp(1)", "--n", "4")
    assert code == 0
    blob = json.loads(out)
    jsonschema.validate(blob, _schema("approx_result.schema.json"))
    assert 4 * blob["error"] == pytest.approx(0.44464, abs=1e-4)


def test_sweep_csv_columns_and_anchor(capsys):
    code, out, _ = _run(capsys, "sweep", "--spec", "exp(1)", "--n", "4..16",
                        "--mode", "best", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["n", "error", "n_error", "limit", "second_order_prediction"]
    first = rows[1]
    assert int(first[0]) == 4
    assert float(first[2]) == pytest.approx(0.3459, abs=1e-4)
    assert float(first[3]) == pytest.approx(0.5 * math.log(2), abs=1e-9)


def test_sweep_json_rows_validate(capsys):
    code, out, _ = _run(capsys, "sweep", "--spec", "uniform(0,1)", "--n", "2..8",
                        "--step", "+3", "--mode", "uniform", "--format", "json")
    assert code == 0
    rows = json.loads(out)
    schema = _schema("sweep_row.schema.json")
    for row in rows:
        jsonschema.validate(row, schema)
    assert [r["n"] for r in rows] == [2, 5, 8]
    for r in rows:
        assert r["n_error"] == pytest.approx(0.25, abs=1e-10)


def test_limits_normal_anchor(capsys):
    code, out, _ = _run(capsys, "limits", "--spec", "normal(0,1)")
    assert code == 0
    blob = json.loads(out)
    jsonschema.validate(blob["best_limit"], _schema("asymptotic_report.schema.json"))
    jsonschema.validate(blob["uniform_limits"], _schema("asymptotic_report.schema.json"))
    assert blob["best_limit"]["values"]["limit"] == pytest.approx(0.3931, abs=1e-4)
    assert blob["uniform_limits"]["values"]["limsup"] == 0.5
    assert blob["best_second_order"]["c2"] == "-inf"


def test_density_rows(capsys):
    code, out, _ = _run(capsys, "density", "--spec", "uniform(0,1)", "--n", "50",
                        "--points", "21", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["x", "density", "empirical_histogram"]
    assert len(rows) == 22
    mid = rows[11]
    assert float(mid[1]) == pytest.approx(1.0, abs=1e-6)


def test_verify_passes_and_reports(capsys):
    code, out, _ = _run(capsys, "verify", "--spec", "uniform(0,1)", "--n", "1",
                        "--x-res", "1e-3", "--p-res", "1e-3", "--box=-0.25:1.25")
    assert code == 0
    blob = json.loads(out)
    assert blob["ok"] is True
    assert blob["gap"] >= -1e-9


def test_exit_code_unsupported_spec(capsys):
    code, _, err = _run(capsys, "limits", "--spec", "nosuch(1)")
    assert code == 4 and "unsupported" in err


def test_exit_code_parse_error(capsys):
    code, _, _ = _run(capsys, "sweep", "--spec", "exp(1)", "--n", "banana")
    assert code == 2
    code, _, _ = _run(capsys, "dist", "--spec", "exp(1)", "--atoms", "{bad json")
    assert code == 2
    code, _, _ = _run(capsys, "best", "--spec", "exp()", "--n", "3")
    assert code == 2


def test_exit_code_unsupported_operation(capsys):
    # point densities are undefined for purely singular measures
    code, _, _ = _run(capsys, "density", "--spec", "two_point(1/2)")
    assert code == 4


def test_limits_partial_when_atoms_inexact(capsys):
    # equal-weight limits need exact rational atoms; the rest still reports
    code, out, err = _run(capsys, "limits", "--spec", "two_point(0.3)")
    assert code == 0
    blob = json.loads(out)
    assert blob["uniform_limits"] is None
    assert blob["best_limit"]["values"]["limit"] == 0.0
    assert "unavailable" in err


def test_outputs_reproducible(capsys):
    argv = ("sweep", "--spec", "exp(1)", "--n", "2..32", "--mode", "uniform",
            "--format", "csv")
    _, out1, _ = _run(capsys, *argv)
    _, out2, _ = _run(capsys, *argv)
    assert out1 == out2


def test_output_file(tmp_path, capsys):
    target = tmp_path / "row.json"
    code, out, _ = _run(capsys, "best", "--spec", "exp(1)", "--n", "2",
                        "--output", str(target))
    assert code == 0 and out == ""
    blob = json.loads(target.read_text())
    assert blob["n"] == 2


def test_numbers_carry_twelve_significant_digits(capsys):
    code, out, _ = _run(capsys, "sweep", "--spec", "exp(1)", "--n", "4..4",
                        "--mode", "best", "--format", "csv")
    assert code == 0
    value = list(csv.reader(io.StringIO(out)))[1][1]
    assert len(value.replace(".", "").lstrip("0")) >= 12


def test_threads_env_respected(capsys, monkeypatch):
    monkeypatch.setenv("LEVYQ_THREADS", "2")
    code, out, _ = _run(capsys, "sweep", "--spec", "exp(1)", "--n", "2..8",
                        "--mode", "uniform", "--format", "csv")
    assert code == 0
    assert len(out.strip().splitlines()) == 4
