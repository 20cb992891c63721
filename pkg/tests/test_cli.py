"""End-to-end tests of the command-line interface."""

import csv
import json

import numpy as np
import pytest

from frontierq.cli import main
from frontierq.simlab import dgp1, gen_dgp


@pytest.fixture(scope="module")
def data_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "sample.csv"
    s = gen_dgp(dgp1(2000), 42)
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["x", "y"])
        for xi, yi in zip(s.x[:, 0], s.y):
            wr.writerow([repr(float(xi)), repr(float(yi))])
    return path


def read_report(out_dir):
    with open(out_dir / "report.csv", newline="") as fh:
        return list(csv.DictReader(fh))


# ---------------------------------------------------------------- estimate


def test_estimate_sub_smoke(data_csv, tmp_path):
    out = tmp_path / "run"
    rc = main([
        "estimate", "--input", str(data_csv), "--x", "3.3",
        "--method", "sub", "--preset", "S2", "--subsamples", "100",
        "--seed", "1", "--out-dir", str(out),
    ])
    assert rc == 0
    rows = read_report(out)
    assert len(rows) == 1 and rows[0]["status"] == "ok"
    assert float(rows[0]["lower"]) <= float(rows[0]["point"]) <= float(rows[0]["upper"])
    assert (out / "manifest.json").exists()
    assert (out / "report_diagnostics.json").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["seed"] == 1


def test_estimate_abc_smoke(data_csv, tmp_path):
    out = tmp_path / "run"
    rc = main([
        "estimate", "--input", str(data_csv), "--x", "3.3",
        "--method", "abc", "--preset", "S2", "--chain-total", "600",
        "--burn-in", "300", "--mc-draws", "200", "--seed", "1",
        "--out-dir", str(out),
    ])
    assert rc == 0
    rows = read_report(out)
    assert rows[0]["status"] == "ok"
    diag = json.loads((out / "report_diagnostics.json").read_text())
    assert "acceptance_rate" in diag[0]


def test_estimate_reruns_byte_identical(data_csv, tmp_path):
    args = [
        "estimate", "--input", str(data_csv), "--x-grid", "2.0:4.0:3",
        "--method", "sub", "--preset", "S2", "--subsamples", "100",
        "--seed", "7",
    ]
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(args + ["--out-dir", str(out_a)]) == 0
    assert main(args + ["--out-dir", str(out_b)]) == 0
    assert (out_a / "report.csv").read_bytes() == (out_b / "report.csv").read_bytes()


def test_estimate_skips_bad_point_but_continues(data_csv, tmp_path):
    out = tmp_path / "run"
    # x = 0.001 has an (almost surely) empty effective sample and is skipped;
    # x = 3.3 still succeeds, so the run exits 0
    rc = main([
        "estimate", "--input", str(data_csv), "--x", "0.001", "--x", "3.3",
        "--method", "sub", "--preset", "S2", "--subsamples", "50",
        "--out-dir", str(out),
    ])
    assert rc == 0
    rows = read_report(out)
    statuses = {r["x"]: r["status"] for r in rows}
    assert statuses["3.3"] == "ok"
    assert statuses["0.001"].startswith("SKIPPED:")


def test_estimate_all_skipped_exits_3(data_csv, tmp_path):
    rc = main([
        "estimate", "--input", str(data_csv), "--x", "0.001",
        "--method", "sub", "--preset", "S2", "--subsamples", "50",
        "--out-dir", str(tmp_path / "run"),
    ])
    assert rc == 3


def test_estimate_no_points_is_input_error(data_csv, tmp_path):
    rc = main(["estimate", "--input", str(data_csv), "--out-dir", str(tmp_path)])
    assert rc == 2


# -------------------------------------------------------------- bad input


def test_malformed_csv_exit_2_with_line_number(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y\n1.0,2.0\n3.0\n")
    rc = main(["estimate", "--input", str(bad), "--x", "1.0", "--out-dir", str(tmp_path)])
    assert rc == 2
    assert ":3:" in capsys.readouterr().err


def test_nonfinite_csv_exit_2(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y\n1.0,nan\n")
    rc = main(["estimate", "--input", str(bad), "--x", "1.0", "--out-dir", str(tmp_path)])
    assert rc == 2


def test_missing_file_exit_2(tmp_path):
    rc = main(["estimate", "--input", str(tmp_path / "nope.csv"), "--x", "1.0",
               "--out-dir", str(tmp_path)])
    assert rc == 2


def test_log_y_requires_positive(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y\n1.0,-2.0\n")
    rc = main(["estimate", "--input", str(bad), "--x", "1.0", "--log-y",
               "--out-dir", str(tmp_path)])
    assert rc == 2


# ----------------------------------------------------- other subcommands


def test_density_subcommand(tmp_path):
    out = tmp_path / "d"
    rc = main(["density", "--grid", "1,2,3", "--xi", "-0.5",
               "--u-grid", "0.5:3.0:6", "--mc-draws", "500", "--out-dir", str(out)])
    assert rc == 0
    with open(out / "density.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 6
    assert all(float(r["value"]) >= 0.0 for r in rows)


def test_limits_subcommand(tmp_path):
    out = tmp_path / "l"
    rc = main(["limits", "--grid", "15,21,27,33", "--xi", "-0.5",
               "--count", "50", "--out-dir", str(out)])
    assert rc == 0
    with open(out / "limits.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 50
    assert set(rows[0]) == {"z27", "z33"}
    assert all(float(r["z27"]) < 0.0 for r in rows)


def test_ev_index_subcommand(data_csv, tmp_path, capsys):
    out = tmp_path / "e"
    rc = main(["ev-index", "--input", str(data_csv), "--x", "3.3",
               "--out-dir", str(out)])
    assert rc == 0
    assert "xi_hat=" in capsys.readouterr().out
    with open(out / "ev_index.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert float(rows[0]["xi_hat"]) < 0.0


def test_simulate_subcommand_tiny(tmp_path):
    out = tmp_path / "s"
    rc = main(["simulate", "--dgp", "1", "--n", "1500", "--x", "3.3",
               "--method", "sub", "--preset", "S2", "--reps", "2",
               "--subsamples", "50", "--out-dir", str(out)])
    assert rc == 0
    with open(out / "study.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1
    assert rows[0]["method"] == "sub-S2"


def test_plot_subcommand(data_csv, tmp_path):
    out = tmp_path / "run"
    assert main([
        "estimate", "--input", str(data_csv), "--x-grid", "2.0:4.0:3",
        "--method", "sub", "--preset", "S2", "--subsamples", "50",
        "--out-dir", str(out),
    ]) == 0
    svg = tmp_path / "frontier.svg"
    rc = main(["plot", "--input", str(data_csv),
               "--report", str(out / "report.csv"), "--out", str(svg)])
    assert rc == 0
    assert svg.read_text().lstrip().startswith("<?xml")


def test_bad_grid_flag(tmp_path):
    rc = main(["density", "--grid", "3,2,1", "--xi", "-0.5",
               "--u", "1.0", "--out-dir", str(tmp_path)])
    assert rc == 2


def test_version_flag(capsys):
    assert main(["--version"]) == 0
