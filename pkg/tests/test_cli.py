import json
import math

import pytest

from hoermander_lab import cli
from hoermander_lab.io import ConfigError, fmt, parse_phi, read_csv


def run_cmd(tmp_path, command, cfg=None, *extra):
    argv = [command, "--out", str(tmp_path / "out"), *extra]
    if cfg is not None:
        path = tmp_path / f"{command}.json"
        path.write_text(json.dumps(cfg))
        argv += ["--config", str(path)]
    code = cli.main(argv)
    out = tmp_path / "out"
    rows = read_csv(out / f"{command}.csv") if (out / f"{command}.csv").exists() else None
    summary = (json.loads((out / f"{command}.json").read_text())
               if (out / f"{command}.json").exists() else None)
    return code, rows, summary


def test_parse_phi_forms():
    assert parse_phi(1)(5.0) == 1.0
    assert parse_phi("1")(5.0) == 1.0
    assert parse_phi("const:2")(5.0) == 2.0
    assert parse_phi("multilog:1")(math.e) == pytest.approx(2.0)
    with pytest.raises(ConfigError):
        parse_phi("bogus")


def test_fmt():
    assert fmt(True) == "true"
    assert fmt(0.1) == "0.1"
    assert fmt(float("inf")) == "inf"
    assert fmt(1 + 2j) == "1.0+2j"
    assert fmt([1, 2.5]) == "1;2.5"


def test_norm_zero_field(tmp_path):
    code, rows, summary = run_cmd(tmp_path, "norm", {"indices": [{"s": 1.0}]})
    assert code == 0 and float(rows[0]["norm"]) == 0.0 and summary["status"] == "ok"


def test_norm_expression(tmp_path):
    cfg = {"field": {"expr": "exp(-x**2/2)"}, "grid": {"N": [256], "L": [40.0]},
           "indices": [{"s": 1.0}, {"s": 1.0, "gamma": 1.0, "phi": "multilog:1"}]}
    code, rows, _ = run_cmd(tmp_path, "norm", cfg)
    assert code == 0
    assert float(rows[0]["norm"]) == pytest.approx(math.sqrt(1.5 * math.sqrt(math.pi)), rel=1e-6)


def test_interp_check(tmp_path):
    code, rows, summary = run_cmd(tmp_path, "interp-check")
    assert code == 0 and summary["status"] == "ok"
    assert all(r["pass"] == "true" for r in rows)


def test_compat_reports_without_failing(tmp_path):
    cfg = {"problem": "heat-dirichlet", "rhs": {"h": "1"}, "s": 3.0}
    code, rows, _ = run_cmd(tmp_path, "compat", cfg)
    assert code == 0
    assert rows and all(r["satisfied"] == "false" for r in rows)


def test_project(tmp_path):
    cfg = {"problem": "heat-dirichlet", "rhs": {"h": "1"}, "s": 3.0}
    code, _, summary = run_cmd(tmp_path, "project", cfg)
    assert code == 0 and summary["max_residual_after"] == 0.0
    assert (tmp_path / "out" / "projected_rhs.json").exists()


def test_solve_heat(tmp_path):
    cfg = {"spec": {"N_x": 64, "N_t": 256}, "rhs": {"h": "sin(pi*x)"},
           "exact": "sin(pi*x)*exp(-pi**2*t)"}
    code, rows, summary = run_cmd(tmp_path, "solve-heat", cfg)
    assert code == 0 and summary["relative_l2_error"] <= 1e-3 and rows


def test_continuity(tmp_path):
    code, rows, _ = run_cmd(tmp_path, "continuity")
    assert code == 0
    cls = {float(r["theta"]): r["classification"] for r in rows}
    assert cls[1.0] == "bounded" and cls[0.0] == "divergent"


def test_bad_key_and_bad_json(tmp_path):
    code, _, _ = run_cmd(tmp_path, "compat", {"bogus": 1})
    assert code == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["compat", "--config", str(bad), "--out", str(tmp_path)]) == 2
    assert cli.main(["compat", "--jobs", "0", "--out", str(tmp_path)]) == 2


def test_command_mismatch(tmp_path):
    code, _, _ = run_cmd(tmp_path, "compat", {"command": "project"})
    assert code == 2


def test_same_seed_same_bytes(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert cli.main(["traces-check", "--out", str(d), "--seed", "7"]) == 0
    assert (a / "traces-check.csv").read_bytes() == (b / "traces-check.csv").read_bytes()


def test_csv_header_has_schema_version(tmp_path):
    run_cmd(tmp_path, "norm", {"indices": [{"s": 0.0}]})
    first = (tmp_path / "out" / "norm.csv").read_text().splitlines()[0]
    assert first == "# schema_version: 1"
