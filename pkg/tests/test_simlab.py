"""Tests for the DGPs and the Monte Carlo study harness."""

import numpy as np
import pytest

from frontierq.errors import StudyFailure
from frontierq.simlab import (
    DgpSpec,
    MethodSpec,
    StudyReport,
    StudyRow,
    dgp1,
    dgp2,
    gen_dgp,
    run_study,
)

FAST_METHODS = (
    MethodSpec(name="sub-S2", engine="sub", preset="S2", S=50),
    MethodSpec(
        name="abc-S2-L2", engine="abc", preset="S2", L=2,
        chain_total=600, burn_in=300, density_mc_draws=200,
    ),
)


# ------------------------------------------------------------------- DGPs


def test_dgp_specs():
    s1, s2 = dgp1(100), dgp2(100)
    assert s1.true_frontier(3.3) == pytest.approx(np.sqrt(3.3))
    assert s2.true_frontier(3.3) == 3.3
    assert s1.true_p0(3.0) == 0.5
    assert s2.true_p0(3.0) == 0.25
    assert s1.true_xi == s2.true_xi == -0.5
    with pytest.raises(ValueError):
        DgpSpec("DGP3", 100)
    with pytest.raises(ValueError):
        DgpSpec("DGP1", 0)


def test_gen_dgp_deterministic():
    a = gen_dgp(dgp1(100), 7)
    b = gen_dgp(dgp1(100), 7)
    assert np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)
    c = gen_dgp(dgp1(100), 8)
    assert not np.array_equal(a.y, c.y)


def test_dgp1_envelopes():
    s = gen_dgp(dgp1(200000), 1)
    x = s.x[:, 0]
    assert np.all((0.0 <= x) & (x <= 6.0))
    assert np.all((0.0 <= s.y) & (s.y <= np.sqrt(x)))
    # P(X <= 3) should be 1/2
    assert np.mean(x <= 3.0) == pytest.approx(0.5, abs=0.005)


def test_dgp2_envelopes_and_p0():
    s = gen_dgp(dgp2(200000), 2)
    x = s.x[:, 0]
    assert np.all((0.0 <= x) & (x <= 6.0))
    assert np.all((0.0 <= s.y) & (s.y <= x))
    # P(X <= 3) = (3/6)^2 = 1/4
    assert np.mean(x <= 3.0) == pytest.approx(0.25, abs=0.005)


def test_dgp2_rejection_sampler_agrees_in_distribution():
    a = gen_dgp(dgp2(100000), 3)
    b = gen_dgp(dgp2(100000), 3, rejection=True)
    # different draws, same law: compare a few quantiles of X and Y
    for q in (0.1, 0.5, 0.9):
        assert np.quantile(a.x, q) == pytest.approx(np.quantile(b.x, q), abs=0.1)
        assert np.quantile(a.y, q) == pytest.approx(np.quantile(b.y, q), abs=0.1)


# ------------------------------------------------------------------ study


def test_run_study_small_smoke():
    rep = run_study(dgp1(1500), [3.3], FAST_METHODS, replications=3, seed=5)
    assert len(rep.rows) == 2
    for row in rep.rows:
        assert row.replications_used == 3
        assert row.failures == 0
        assert 0.0 <= row.coverage <= 1.0
        assert row.avg_length >= 0.0
        assert row.rmse + 1e-12 >= row.mad >= abs(row.bias) - 1e-12


def test_run_study_single_replication_degenerate_stats():
    rep = run_study(dgp1(1500), [3.3], FAST_METHODS[:1], replications=1, seed=6)
    row = rep.rows[0]
    assert row.coverage in (0.0, 1.0)
    assert row.rmse == pytest.approx(abs(row.bias))
    assert row.mad == pytest.approx(abs(row.bias))


def test_run_study_worker_invariance():
    a = run_study(dgp1(1200), [3.3], FAST_METHODS, replications=4, seed=7, workers=1)
    b = run_study(dgp1(1200), [3.3], FAST_METHODS, replications=4, seed=7, workers=2)
    assert a.rows == b.rows


def test_run_study_failure_on_bad_x():
    # x so small the effective sample is empty or tiny in every replication
    with pytest.raises(StudyFailure):
        run_study(dgp1(300), [0.0001], FAST_METHODS[:1], replications=2, seed=8)


def test_run_study_validation():
    with pytest.raises(ValueError):
        run_study(dgp1(100), [3.3], FAST_METHODS, replications=0)
    with pytest.raises(ValueError):
        MethodSpec(name="x", engine="other")
    with pytest.raises(ValueError):
        MethodSpec(name="x", engine="abc", point_stat="mode")


def test_report_round_trip(tmp_path):
    rep = run_study(dgp1(1500), [3.3], FAST_METHODS[:1], replications=2, seed=9)
    csv_path = tmp_path / "study.csv"
    json_path = tmp_path / "study.json"
    rep.to_csv(csv_path)
    rep.to_json(json_path)

    import csv as csvmod
    import json

    with open(csv_path, newline="") as fh:
        rows = list(csvmod.DictReader(fh))
    assert len(rows) == 1
    # repr-formatted floats round-trip exactly
    assert float(rows[0]["coverage"]) == rep.rows[0].coverage
    assert float(rows[0]["rmse"]) == rep.rows[0].rmse

    with open(json_path) as fh:
        payload = json.load(fh)
    assert payload["dgp_id"] == "DGP1" and payload["replications"] == 2
    assert payload["rows"][0]["bias"] == rep.rows[0].bias
    assert "runtime_seconds" not in payload  # reports are byte-reproducible


def test_report_byte_reproducible(tmp_path):
    a = run_study(dgp1(1500), [3.3], FAST_METHODS[:1], replications=2, seed=10)
    b = run_study(dgp1(1500), [3.3], FAST_METHODS[:1], replications=2, seed=10)
    pa, pb = tmp_path / "a.csv", tmp_path / "b.csv"
    a.to_csv(pa)
    b.to_csv(pb)
    assert pa.read_bytes() == pb.read_bytes()
    assert a == b  # runtime_seconds is excluded from comparison
