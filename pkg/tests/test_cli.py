"""Command-line front end: config precedence, schemas, determinism, exit codes."""

import csv
import json
import math
import os
import subprocess
import sys

import pytest

from detglue.cli import RunConfig, emit, main, parse_config, run
from detglue.errors import ConfigError


def _run_cli(args, tmp_path, env_extra=None):
    env = dict(os.environ)
    env["SOURCE_DATE_EPOCH"] = "1755907200"
    if env_extra:
        env.update(env_extra)
    return subprocess.run([sys.executable, "-m", "detglue.cli"] + args,
                          cwd=tmp_path, env=env, capture_output=True, text=True)


def test_parse_config_direct_mapping():
    cfg = parse_config(["det", "--geometry", "circle", "--L", "2", "--m", "1"])
    assert cfg.command == "det"
    assert cfg["geometry"] == "circle"
    assert cfg["L"] == 2.0 and cfg["m"] == 1.0


def test_flag_overrides_file(tmp_path):
    f = tmp_path / "cfg.txt"
    f.write_text("k_max = 256\nL = 3 # comment\n", encoding="utf-8")
    cfg = parse_config(["det", "--config", str(f), "--k-max", "512"])
    assert cfg["k_max"] == 512
    assert cfg["L"] == 3.0


def test_unknown_key_rejected(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig("det", {"bogus": 1})
    f = tmp_path / "cfg.txt"
    f.write_text("bogus = 1\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        parse_config(["det", "--config", str(f)])


def test_budget_and_enum_validation():
    with pytest.raises(ConfigError):
        RunConfig("det", {"k_max": 0})
    with pytest.raises(ConfigError):
        RunConfig("det", {"format": "xml"})
    with pytest.raises(ConfigError):
        RunConfig("orbit", {})


def test_det_interval_oracle(tmp_path):
    r = _run_cli(["det", "--geometry", "interval", "--L",
                  str(math.pi), "--m", "0", "--output", "rep"], tmp_path)
    assert r.returncode == 0, r.stderr
    data = json.loads((tmp_path / "rep.json").read_text())
    assert data["payload"]["logdet"] == pytest.approx(math.log(2 * math.pi),
                                                      abs=1e-9)


def test_glue_circle_payload_and_csv_schema(tmp_path):
    r = _run_cli(["glue", "--geometry", "circle", "--L", "2", "--m", "1",
                  "--format", "both", "--output", "rep"], tmp_path)
    assert r.returncode == 0, r.stderr
    data = json.loads((tmp_path / "rep.json").read_text())
    assert data["payload"]["log_c"] == pytest.approx(-math.log(2), abs=1e-8)
    with open(tmp_path / "rep.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["quantity", "value", "error"]
    quantities = [row[0] for row in rows[1:]]
    assert quantities == ["log_det_closed", "log_det_dirichlet",
                          "log_det_R", "log_c"]


def test_positivity_violation_exit_code(tmp_path):
    r = _run_cli(["det", "--geometry", "circle", "--m", "0",
                  "--output", "rep"], tmp_path)
    assert r.returncode == 3
    assert not (tmp_path / "rep.json").exists()  # no partial success output


def test_config_error_exit_code(tmp_path):
    r = _run_cli(["det", "--format", "xml", "--output", "rep"], tmp_path)
    assert r.returncode == 2


def test_determinism_byte_identical(tmp_path):
    args = ["glue", "--geometry", "circle", "--L", "2", "--m", "1",
            "--format", "both", "--output", "rep"]
    _run_cli(args, tmp_path)
    first_json = (tmp_path / "rep.json").read_bytes()
    first_csv = (tmp_path / "rep.csv").read_bytes()
    _run_cli(args, tmp_path)
    assert (tmp_path / "rep.json").read_bytes() == first_json
    assert (tmp_path / "rep.csv").read_bytes() == first_csv


def test_json_roundtrip_identity(tmp_path):
    _run_cli(["det", "--geometry", "circle", "--L", "2", "--m", "1",
              "--output", "rep"], tmp_path)
    raw = (tmp_path / "rep.json").read_text()
    assert json.dumps(json.loads(raw), indent=2) + "\n" == raw


def test_output_dir_env_var(tmp_path):
    out = tmp_path / "artifacts"
    out.mkdir()
    r = _run_cli(["det", "--geometry", "circle", "--L", "2", "--m", "1",
                  "--output", "rep"], tmp_path,
                 env_extra={"DETGLUE_OUTPUT_DIR": str(out)})
    assert r.returncode == 0, r.stderr
    assert (out / "rep.json").exists()


def test_asymfit_series_schema(tmp_path):
    r = _run_cli(["asymfit", "--geometry", "circle", "--L", "2", "--m", "1",
                  "--grid-points", "32", "--format", "both",
                  "--output", "rep"], tmp_path)
    assert r.returncode == 0, r.stderr
    with open(tmp_path / "rep_series.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["lambda", "logdet", "model", "residual"]
    assert len(rows) == 33
    for row in rows[1:]:
        float(row[0]), float(row[1]), float(row[2]), float(row[3])
