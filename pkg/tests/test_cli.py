import json

import numpy as np
import pytest

from nilgauss.cli import (
    ConfigError,
    EXAMPLE_JOBS,
    document_to_csv,
    document_to_json,
    load_config,
    main,
    run,
)


BASE_CONFIG = {
    "algebra": {"builtin": "heisenberg", "m": 1},
    "model": "nil_polarized",
    "chart": {"catalog": "nil_vertical_plane"},
    "domain": [[-1.0, 1.0], [-1.0, 1.0]],
    "grid": [3, 3],
    "methods": ["general", "numeric_oracle"],
    "checks": ["harmonicity"],
    "seed": 0,
}


def write_config(tmp_path, doc, name="job.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def test_empty_methods_rejected():
    doc = dict(BASE_CONFIG)
    doc["methods"] = []
    with pytest.raises(ConfigError) as err:
        load_config(doc)
    assert "no methods requested" in err.value.problems


def test_config_errors_are_collected():
    doc = dict(BASE_CONFIG)
    doc["methods"] = ["nonsense"]
    doc["checks"] = ["also_nonsense"]
    doc["grid"] = [1, 3]
    with pytest.raises(ConfigError) as err:
        load_config(doc)
    text = " ".join(err.value.problems)
    assert "nonsense" in text
    assert "also_nonsense" in text
    assert "at least 2" in text


def test_inline_algebra_and_validation():
    doc = dict(BASE_CONFIG)
    doc["algebra"] = {
        "dim_total": 3,
        "dim_center": 1,
        "brackets": [{"i": 1, "j": 2, "k": 3, "c": 1.0}],
    }
    config = load_config(doc)
    assert config.algebra.dim_total == 3


def test_invalid_algebra_reported():
    doc = dict(BASE_CONFIG)
    doc["model"] = "exp"
    doc["chart"] = {"catalog": "graph", "params": {"expr": "0"}}
    doc["algebra"] = {"dim_total": 3, "dim_center": 1, "brackets": []}  # abelian
    with pytest.raises(ConfigError) as err:
        load_config(doc)
    assert any("non-abelian" in p for p in err.value.problems)


def test_checks_gated_by_algebra_shape():
    doc = dict(BASE_CONFIG)
    doc["model"] = "exp"
    doc["algebra"] = {"builtin": "heisenberg", "m": 2}
    doc["chart"] = {"catalog": "graph", "params": {"expr": "0.1*u1*u2"}}
    doc["domain"] = [[-1, 1]] * 4
    doc["grid"] = [2, 2, 2, 2]
    doc["methods"] = ["general"]
    doc["checks"] = ["gauss_codazzi"]  # needs a 3-dimensional model
    with pytest.raises(ConfigError) as err:
        load_config(doc)
    assert any("3-dimensional" in p for p in err.value.problems)


def test_heisenberg_method_needs_heisenberg_algebra():
    doc = dict(BASE_CONFIG)
    doc["model"] = "exp"
    doc["chart"] = {"catalog": "graph", "params": {"expr": "0.1*u1*u2"}}
    doc["domain"] = [[-1, 1]] * 4
    doc["grid"] = [2, 2, 2, 2]
    doc["algebra"] = {
        "dim_total": 5,
        "dim_center": 2,
        "brackets": [
            {"i": 1, "j": 2, "k": 4, "c": 1.0},
            {"i": 1, "j": 3, "k": 5, "c": 1.0},
        ],
    }
    doc["methods"] = ["heisenberg"]
    with pytest.raises(ConfigError) as err:
        load_config(doc)
    assert any("Heisenberg algebra" in p for p in err.value.problems)


def test_run_vertical_plane_passes():
    config = load_config(EXAMPLE_JOBS["nil_vertical_plane"][1])
    doc = run(config)
    assert doc["summary"]["max_defect"] == 0.0
    assert all(res["pass"] for res in doc["summary"]["checks"].values())
    assert doc["summary"]["max_oracle_gap"] < 1e-7


def test_report_round_trip_bit_exact():
    config = load_config(EXAMPLE_JOBS["nil_vertical_plane"][1])
    doc = run(config)
    text = document_to_json(doc)
    reparsed = json.loads(text)
    assert document_to_json(reparsed) == text
    # numeric fields survive exactly
    assert reparsed["rows"][0]["coeffs"] == doc["rows"][0]["coeffs"]


def test_run_deterministic():
    config1 = load_config(EXAMPLE_JOBS["nil_cylinder_circle"][1])
    config2 = load_config(EXAMPLE_JOBS["nil_cylinder_circle"][1])
    assert document_to_json(run(config1)) == document_to_json(run(config2))


def test_csv_export():
    config = load_config(EXAMPLE_JOBS["nil_vertical_plane"][1])
    doc = run(config)
    csv_text = document_to_csv(doc)
    header = csv_text.splitlines()[0].split(",")
    assert header[:2] == ["u1", "u2"]
    assert "h" in header and "norm_b2" in header and "defect" in header
    assert "normal_general" in header
    assert len(csv_text.splitlines()) == 1 + doc["summary"]["points"]


def test_main_sweep_and_exit_codes(tmp_path, capsys):
    path = write_config(tmp_path, BASE_CONFIG)
    out = tmp_path / "report.json"
    code = main(["sweep", "--config", path, "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["summary"]["checks"]["harmonicity"]["pass"]


def test_main_report_single_point(tmp_path):
    path = write_config(tmp_path, BASE_CONFIG)
    out = tmp_path / "report.json"
    code = main(["report", "--config", path, "--point", "0.25,0.1", "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["summary"]["points"] == 1
    assert doc["rows"][0]["point"] == [0.25, 0.1]


def test_main_report_defaults_to_domain_center(tmp_path):
    path = write_config(tmp_path, BASE_CONFIG)
    out = tmp_path / "report.json"
    assert main(["report", "--config", path, "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["rows"][0]["point"] == [0.0, 0.0]


def test_main_csv_output(tmp_path):
    path = write_config(tmp_path, BASE_CONFIG)
    out = tmp_path / "report.csv"
    assert main(["sweep", "--config", path, "--format", "csv", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("u1,u2,h,norm_b2,defect")
    assert len(lines) == 10  # header + 3x3 grid


def test_main_compare_verb(tmp_path):
    doc = dict(BASE_CONFIG)
    doc["methods"] = ["general"]
    doc["checks"] = []
    path = write_config(tmp_path, doc)
    out = tmp_path / "cmp.json"
    code = main(["compare", "--config", path, "--out", str(out)])
    assert code == 0
    result = json.loads(out.read_text())
    assert result["summary"]["checks"]["oracle_gap"]["pass"]


def test_main_validate_verb(tmp_path):
    path = write_config(tmp_path, BASE_CONFIG)
    assert main(["validate", "--config", path]) == 0


def test_main_validate_reports_violations(tmp_path, capsys):
    doc = dict(BASE_CONFIG)
    doc["algebra"] = {"dim_total": 3, "dim_center": 1, "brackets": []}
    path = write_config(tmp_path, doc)
    assert main(["validate", "--config", path]) == 1
    out = json.loads(capsys.readouterr().out)
    assert not out["valid"]
    assert any(v["name"] == "non-abelian" for v in out["violations"])


def test_main_config_error_exit_2(tmp_path):
    doc = dict(BASE_CONFIG)
    doc["methods"] = []
    path = write_config(tmp_path, doc)
    assert main(["sweep", "--config", path]) == 2


def test_main_bad_json_exit_2(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert main(["sweep", "--config", str(path)]) == 2


def test_main_check_failure_exit_1(tmp_path):
    doc = {
        "algebra": {"builtin": "heisenberg", "m": 1},
        "model": "nil_polarized",
        "chart": {"catalog": "nil_foliation_leaf"},
        "domain": [[0.4, 1.2], [-0.4, 0.4]],
        "grid": [3, 2],
        "methods": ["general"],
        "checks": ["harmonicity"],  # the leaf is not harmonic
    }
    path = write_config(tmp_path, doc)
    assert main(["sweep", "--config", path]) == 1


def test_main_examples_listing(capsys):
    assert main(["examples"]) == 0
    out = capsys.readouterr().out
    for name in EXAMPLE_JOBS:
        assert name in out


def test_main_examples_run(tmp_path):
    out = tmp_path / "ex.json"
    assert main(["examples", "nil_foliation_example", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    rows = [
        r
        for r in doc["rows"]
        if abs(r["point"][0]) < 1e-12 and abs(r["point"][1]) < 1e-12
    ]
    by_method = {r["method"]: r for r in rows}
    np.testing.assert_allclose(by_method["general"]["coeffs"], [0, 0, -1], atol=1e-10)
    np.testing.assert_allclose(
        by_method["numeric_oracle"]["coeffs"], [0, 0, -1], atol=5e-4
    )


def test_main_examples_unknown(capsys):
    assert main(["examples", "nope"]) == 2


def test_random_graph_chart_config(tmp_path):
    doc = {
        "algebra": {"builtin": "heisenberg", "m": 1},
        "model": "exp",
        "chart": {"catalog": "random_graph", "params": {"index": 2}},
        "grid": [3, 3],
        "methods": ["general", "numeric_oracle"],
        "checks": [],
        "seed": 5,
    }
    path = write_config(tmp_path, doc)
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["compare", "--config", path, "--out", str(out1)]) == 0
    assert main(["compare", "--config", path, "--out", str(out2)]) == 0
    assert out1.read_text() == out2.read_text()
