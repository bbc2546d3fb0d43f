import math

import numpy as np
import pytest

from ckfahrs.ahrs import AhrsConfig
from ckfahrs.evaluate import compare, format_table, plot_csv, report_csv, rmse, run_filter
from ckfahrs.linalg import Method


def test_rmse_identity():
    e = np.random.default_rng(0).uniform(0, 1, (50, 3))
    np.testing.assert_array_equal(rmse(e, e), 0.0)


def test_rmse_constant_roll_offset():
    truth = np.zeros((10, 3))
    est = truth.copy()
    est[:, 0] = math.radians(1.0)
    np.testing.assert_allclose(rmse(est, truth), [1.0, 0.0, 0.0], atol=1e-12)


def test_rmse_yaw_wrap():
    truth = np.tile([0.0, 0.0, math.radians(359.0)], (5, 1))
    est = np.tile([0.0, 0.0, math.radians(1.0)], (5, 1))
    assert rmse(est, truth)[2] == pytest.approx(2.0)


def test_rmse_invariant_to_2pi_shift():
    rng = np.random.default_rng(1)
    truth = rng.uniform(0, 2 * np.pi, (40, 3))
    est = truth + rng.normal(0, 0.01, truth.shape)
    shifted = est.copy()
    shifted[::3, 2] += 2 * np.pi
    np.testing.assert_allclose(rmse(shifted, truth), rmse(est, truth), rtol=1e-12)


def test_rmse_skips_missing_rows():
    truth = np.zeros((4, 3))
    est = np.full((4, 3), math.radians(2.0))
    est[2:] = np.nan
    np.testing.assert_allclose(rmse(est, truth), 2.0)
    assert np.all(np.isnan(rmse(np.full((2, 3), np.nan), np.zeros((2, 3)))))
    with pytest.raises(ValueError):
        rmse(np.zeros((2, 3)), np.zeros((3, 3)))


def test_self_comparison_rows_identical(short_low_dynamic):
    _, imu, truth = short_low_dynamic
    cmp = compare(imu, truth, AhrsConfig(), ["svdckf", "svdckf"], open_loop=False)
    a, b = cmp.reports()
    np.testing.assert_array_equal(a.rmse_deg, b.rmse_deg)
    np.testing.assert_array_equal(cmp.runs[0].euler, cmp.runs[1].euler)


def test_injection_fails_only_cholesky(short_low_dynamic):
    _, imu, truth = short_low_dynamic
    cmp = compare(imu, truth, AhrsConfig(), (Method.CHOLESKY, Method.SVD), inject_step=300)
    ckf, svd, ol = cmp.reports()
    assert ckf.status == "FAILED@300" and ckf.n_samples == 300
    assert svd.status == "ok" and svd.n_samples == len(imu)
    assert ol.status == "ok" and ol.n_updates == 0
    assert np.all(np.isnan(cmp.runs[0].euler[300:]))
    assert "pivot" in cmp.runs[0].error


def test_run_filter_records_flags(short_low_dynamic):
    _, imu, _ = short_low_dynamic
    run = run_filter(imu, AhrsConfig(), Method.SVD)
    assert run.status == "ok"
    assert run.updated.sum() == len(imu) - 1
    assert run.accel_valid[1:].all() and run.mag_valid[1:].all()
    assert run.runtime_s > 0


def test_report_formats(short_low_dynamic):
    _, imu, truth = short_low_dynamic
    cmp = compare(imu, truth, AhrsConfig(), ["svdckf"], scenario="short")
    reports = cmp.reports()
    table = format_table(reports)
    assert "short" in table and "SVDCKF" in table and "open-loop" in table
    assert "runtime" not in table and "runtime" in format_table(reports, timing=True)
    rows = report_csv(reports).splitlines()
    assert rows[0].startswith("scenario,filter,status")
    assert len(rows) == 3
    roll = float(rows[1].split(",")[5])
    assert roll == pytest.approx(reports[0].rmse_deg[0], abs=5e-5)
    header = plot_csv(cmp).splitlines()[0].split(",")
    assert header[:4] == ["t", "truth_roll_deg", "truth_pitch_deg", "truth_yaw_deg"]
    assert "svdckf_updated" in header and "open_loop_yaw_deg" in header


def test_empty_table():
    assert format_table([]) == ""
