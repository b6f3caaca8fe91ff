import csv
import io
import json
import subprocess
import sys

import pytest

from dftnorms import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_norm_dirac_comb(capsys):
    code, out, _ = run(capsys, "norm", "--n", "16", "--rows", "4,8,12,16", "--cols", "4,8,12,16")
    d = json.loads(out)
    assert code == 0
    assert d["norm"] == pytest.approx(1.0, abs=1e-10)
    assert d["condition_number"] == "inf"
    assert not d["linearly_independent"]
    assert abs(d["gram_min_eigenvalue"]) < 1e-10


def test_norm_single_entry(capsys):
    code, out, _ = run(capsys, "norm", "--n", "8", "--rows", "1", "--cols", "1")
    assert code == 0
    assert json.loads(out)["norm"] == pytest.approx(8 ** -0.5, abs=1e-11)


def test_norm_csv(capsys):
    code, out, _ = run(capsys, "norm", "--n", "8", "--rows", "1,2", "--cols", "1", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and rows[0]["norm"] == format(0.5, ".12g")


@pytest.mark.parametrize("argv", [
    ["norm", "--n", "8", "--rows", "1,2,3", "--cols", "9"],
    ["norm", "--n", "8", "--rows", "1,a", "--cols", "1"],
    ["norm", "--rows", "1", "--cols", "1"],
    ["bounds", "--n", "16", "--t-size", "17", "--omega-size", "1"],
    ["bounds", "--n", "16"],
    ["experiment", "fig1", "--n", "64", "--delta-grid", "0.1:0.2"],
    ["verify", "tao", "--n", "8"],
    ["verify", "donoho-stark", "--n", "14"],
    ["nosuchcommand"],
    ["experiment", "fig1", "--seed", "-1"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err


def test_bounds_examples(capsys):
    code, out, _ = run(capsys, "bounds", "--n", "16", "--t-size", "3", "--omega-size", "5")
    reps = {r["name"]: r for r in json.loads(out)["reports"]}
    assert code == 0
    assert reps["donoho_stark"]["premises_hold"]
    assert reps["donoho_stark"]["bound_value"] == pytest.approx(0.968245836552)
    _, out, _ = run(capsys, "bounds", "--n", "7", "--t-size", "3", "--omega-size", "4")
    assert {r["name"]: r for r in json.loads(out)["reports"]}["tao"]["premises_hold"]
    _, out, _ = run(capsys, "bounds", "--n", "16", "--t-size", "4", "--omega-size", "4")
    ds = {r["name"]: r for r in json.loads(out)["reports"]}["donoho_stark"]
    assert not ds["premises_hold"] and "Dirac comb" in ds["premise_detail"]
    for r in json.loads(out)["reports"]:
        assert r["bounds_quantity"] in ("norm", "norm_squared")


def test_bounds_spread_and_epsilon(capsys):
    code, out, _ = run(capsys, "bounds", "--n", "16", "--t-size", "4", "--omega-size", "4",
                       "--spread", "4", "--epsilon", "0.25", "--format", "csv")
    names = [r["name"] for r in csv.DictReader(io.StringIO(out))]
    assert code == 0 and "large_sieve" in names and "both_random" in names


def test_experiment_schema(capsys):
    code, out, _ = run(capsys, "experiment", "fig1", "--n", "64", "--trials", "4", "--seed", "7",
                       "--delta-grid", "0.1:0.3:3")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "delta,mean_norm,std_norm,min_norm,max_norm,trials,n,scaling"
    assert len(lines) == 4 and "\r" not in out
    row = next(csv.DictReader(io.StringIO(out)))
    assert row["scaling"] == "none" and row["trials"] == "4"


def test_experiment_rect_and_quartercircle(capsys, tmp_path):
    svg = tmp_path / "rect.svg"
    code, out, _ = run(capsys, "experiment", "fig4", "--n", "32", "--trials", "3",
                       "--delta-grid", "0.25,0.5", "--svg", str(svg))
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 4
    assert set(rows[0]) == set(cli.RECT_COLUMNS)
    assert svg.read_text().startswith("<svg")
    code, out, _ = run(capsys, "experiment", "quartercircle", "--n", "64", "--trials", "3",
                       "--delta-grid", "0.25", "--format", "json")
    d = json.loads(out)
    assert code == 0 and "deviation" in d["rows"][0] and d["metadata"]["n"] == 64


def test_experiment_budget_exit_3(capsys):
    code, _, err = run(capsys, "experiment", "fig1", "--n", "1024", "--trials", "2",
                       "--delta-grid", "0.5", "--budget", "100")
    assert code == 3 and "guard" in err


def test_verify_pass_and_fail_codes(capsys):
    code, out, _ = run(capsys, "verify", "coords", "--n", "6", "--delta", "0.5")
    d = json.loads(out)
    assert code == 0 and d["passed"] and d["max_ratio_one_sided"] <= 2


def test_verify_failure_exit_1(capsys, monkeypatch):
    monkeypatch.setattr(cli.verify, "check_square_case",
                        lambda n: {"target": "square-case", "passed": False})
    code, out, _ = run(capsys, "verify", "square-case", "--n", "6")
    assert code == 1 and json.loads(out)["passed"] is False


def test_verify_tail_recipe(capsys):
    code, out, _ = run(capsys, "verify", "tail", "--n", "128", "--delta", "0.05", "--trials", "200")
    d = json.loads(out)
    assert code == 0 and d["rows"][0]["frequency"] == 0.0


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "plan.ini"
    cfg.write_text("[dftnorms]\nn = 32\ntrials = 2\ndelta_grid = 0.5\nformat = json\n")
    code, out, _ = run(capsys, "experiment", "fig1", "--config", str(cfg))
    d = json.loads(out)
    assert code == 0 and d["metadata"]["n"] == 32 and d["metadata"]["trials"] == 2
    code, out, _ = run(capsys, "experiment", "fig1", "--config", str(cfg), "--n", "16", "--format", "csv")
    assert code == 0 and out.splitlines()[1].split(",")[6] == "16"
    code, _, _ = run(capsys, "experiment", "fig1", "--config", str(tmp_path / "missing.ini"))
    assert code == 2


def test_output_file(capsys, tmp_path):
    path = tmp_path / "o.csv"
    code, out, _ = run(capsys, "experiment", "fig2", "--n", "64", "--trials", "2",
                       "--delta-grid", "0.25", "--out", str(path))
    assert code == 0 and out == ""
    assert path.read_text().startswith("delta,")


COMMANDS = [
    ["norm", "--n", "16", "--rows", "1,3,5", "--cols", "2,4"],
    ["bounds", "--n", "1024", "--t-size", "10", "--omega-size", "30", "--epsilon", "0.3"],
    ["experiment", "fig1", "--n", "128", "--trials", "6", "--delta-grid", "0.1:0.5:3"],
    ["experiment", "fig2", "--n", "128", "--trials", "6", "--delta-grid", "0.1:0.5:3"],
    ["experiment", "fig3", "--n", "32", "--trials", "4", "--delta-grid", "0.2,0.6"],
    ["experiment", "fig4", "--n", "32", "--trials", "4", "--delta-grid", "0.2,0.6"],
    ["experiment", "argmax", "--n", "64", "--trials", "4"],
    ["experiment", "quartercircle", "--n", "64", "--trials", "4", "--delta-grid", "0.1,0.4"],
    ["verify", "donoho-stark", "--n", "6"],
    ["verify", "tao", "--n", "11", "--trials", "30"],
    ["verify", "coords", "--n", "6"],
    ["verify", "square-case", "--n", "6"],
    ["verify", "moment", "--n", "256", "--q", "12", "--trials", "300"],
    ["verify", "extrap", "--n", "128", "--q", "64", "--trials", "200"],
    ["verify", "tail", "--n", "128", "--delta", "0.25", "--lambda", "0.1", "--q", "2", "--u", "1,2",
     "--trials", "100"],
]


@pytest.mark.parametrize("argv", COMMANDS, ids=lambda a: "-".join(a[:2]))
def test_deterministic_across_runs_and_threads(capsys, argv):
    outs = []
    for workers in ("1", "1", "4"):
        code, out, _ = run(capsys, *argv, "--seed", "11", "--workers", workers)
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1] == outs[2]


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "dftnorms.cli", "norm", "--n", "4", "--rows", "1",
                           "--cols", "1"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["norm"] == pytest.approx(0.5)
