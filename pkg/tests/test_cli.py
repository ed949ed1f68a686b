import json
import subprocess
import sys

import pytest

from react_resilience import bench
from react_resilience.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, main


def run(*argv):
    try:
        return main([str(a) for a in argv])
    except SystemExit as exc:  # argparse exits on bad flags
        return exc.code


@pytest.fixture(scope="module")
def suite(tmp_path_factory):
    out = tmp_path_factory.mktemp("suite")
    assert run("generate", "--n", 4, 5, "--p", 0.3, "--layers", 1, "--seed", 7, "--out", out) == EXIT_OK
    return out / "manifest.json"


@pytest.fixture(scope="module")
def results(suite, tmp_path_factory):
    out = tmp_path_factory.mktemp("res") / "r.csv"
    code = run("sweep", "--suite", suite, "--solvers", "tsc-dsatur", "dsatur", "hc", "--iterations", 100,
               "--breach-sample", "per-asset", "--out", out, "--quiet")
    assert code == EXIT_OK
    return out


def test_generate_writes_manifest(suite):
    doc = json.loads(suite.read_text())
    assert [m["n"] for m in doc["members"]] == [4, 5]
    assert doc["spec"]["seed"] == 7


def test_generate_from_spec_file(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"n": [3], "p_components": [0.1], "instance_layers": 2}))
    assert run("generate", "--spec", spec, "--out", tmp_path / "o") == EXIT_OK
    assert len(json.loads((tmp_path / "o" / "manifest.json").read_text())["members"]) == 2


def test_generate_usage_errors(tmp_path):
    assert run("generate", "--p", 2.0, "--out", tmp_path) == EXIT_USAGE
    assert run("generate", "--n", 0, "--out", tmp_path) == EXIT_USAGE
    assert run("generate") == EXIT_USAGE


def test_generate_bad_spec_file_is_data_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run("generate", "--spec", bad, "--out", tmp_path) == EXIT_DATA
    assert run("generate", "--spec", tmp_path / "missing.json", "--out", tmp_path) == EXIT_DATA


def test_attack_prints_row(suite, capsys):
    scenario = suite.parent / json.loads(suite.read_text())["members"][0]["file"]
    assert run("attack", "--scenario", scenario, "--component", 0, "--projection", "network",
               "--solver", "tsc-dsatur") == EXIT_OK
    row = json.loads(capsys.readouterr().out)
    assert row["risk_ratio"] <= 1.0 and row["solver"] == "tsc-dsatur" and row["error"] == ""


def test_attack_errors(suite, tmp_path):
    scenario = suite.parent / json.loads(suite.read_text())["members"][0]["file"]
    base = ["attack", "--scenario", scenario, "--projection", "config", "--solver", "hc"]
    assert run(*base, "--component", 999) == EXIT_DATA
    assert run(*base[:-1], "nope", "--component", 0) == EXIT_USAGE
    assert run("attack", "--scenario", scenario, "--component", 0, "--projection", "sideways",
               "--solver", "hc") == EXIT_USAGE
    broken = tmp_path / "broken.json"
    broken.write_text('{"assets": 3}')
    assert run("attack", "--scenario", broken, "--component", 0, "--projection", "config",
               "--solver", "hc") == EXIT_DATA


def test_sweep_rows(results):
    rows = bench.read_csv(results)
    assert len(rows) == (4 + 5) * 2 * 3
    assert all(r.ok and 0 < r.risk_ratio <= 1 for r in rows)
    assert results.read_bytes().startswith(",".join(bench.ROW_FIELDS).encode() + b"\n")


def test_sweep_missing_suite_is_data_error(tmp_path):
    assert run("sweep", "--suite", tmp_path / "none.json", "--out", tmp_path / "r.csv", "--quiet") == EXIT_DATA


def test_sweep_bad_jobs_is_usage_error(suite, tmp_path):
    assert run("sweep", "--suite", suite, "--jobs", 0, "--out", tmp_path / "r.csv") == EXIT_USAGE


@pytest.mark.parametrize("mode", ["summary", "table", "plotdata"])
def test_report_modes(results, tmp_path, mode):
    out = tmp_path / f"{mode}.out"
    assert run("report", "--in", results, "--mode", mode, "--out", out) == EXIT_OK
    assert out.read_text().strip()


def test_report_centrality(results, suite, tmp_path):
    out = tmp_path / "c.csv"
    assert run("report", "--in", results, "--mode", "centrality", "--out", out) == EXIT_USAGE
    assert run("report", "--in", results, "--mode", "centrality", "--suite", suite, "--out", out) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# closeness convention") and len(lines) >= 4


def test_report_rejects_bad_csv(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y\n")
    assert run("report", "--in", bad, "--mode", "summary", "--out", tmp_path / "o") == EXIT_DATA
    assert run("report", "--in", bad, "--mode", "bogus", "--out", tmp_path / "o") == EXIT_USAGE


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "react_resilience.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "generate" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "react_resilience.cli"], capture_output=True, text=True)
    assert proc.returncode == EXIT_USAGE
