"""Run estimators over a sensor stream and score them against attitude truth."""

from __future__ import annotations

import io
import math
import time
from dataclasses import dataclass, replace

import numpy as np

from .ahrs import AhrsConfig, AhrsEstimator
from .attitude import wrap_pi
from .errors import FactorizationFailed, IllConditioned
from .linalg import Method
from .sim import ImuSeries, TruthSeries

LABELS = {Method.CHOLESKY: "CKF", Method.SVD: "SVDCKF", None: "open-loop"}
AXES = ("roll", "pitch", "yaw")


def rmse(est, truth) -> np.ndarray:
    """Per-axis RMSE in degrees between two ``(N, 3)`` Euler series [rad].

    Differences are wrapped to (-pi, pi] before squaring, so yaw 359 deg
    against 1 deg counts as a 2 deg error. Rows where either series is NaN
    are skipped.
    """
    est = np.asarray(est, float)
    truth = np.asarray(truth, float)
    if est.shape != truth.shape:
        raise ValueError(f"series shapes differ: {est.shape} vs {truth.shape}")
    keep = np.all(np.isfinite(est), axis=1) & np.all(np.isfinite(truth), axis=1)
    if not keep.any():
        return np.full(3, np.nan)
    err = wrap_pi(est[keep] - truth[keep])
    return np.degrees(np.sqrt(np.mean(err**2, axis=0)))


@dataclass
class FilterRun:
    label: str
    euler: np.ndarray
    q: np.ndarray
    drift: np.ndarray
    updated: np.ndarray
    accel_valid: np.ndarray
    mag_valid: np.ndarray
    failed_at: int | None = None
    error: str = ""
    runtime_s: float = 0.0

    @property
    def status(self) -> str:
        return "ok" if self.failed_at is None else f"FAILED@{self.failed_at}"


@dataclass(frozen=True)
class RmseReport:
    scenario: str
    label: str
    rmse_deg: np.ndarray
    n_samples: int
    n_updates: int
    status: str
    runtime_ms: float


def run_filter(
    imu: ImuSeries,
    cfg: AhrsConfig,
    method: Method | None,
    inject_step: int | None = None,
) -> FilterRun:
    """Initialize from the first ``cfg.init_samples`` samples, then process the rest.

    ``method=None`` runs open-loop gyro integration. ``inject_step`` zeroes
    one row/column of the covariance just before sample ``inject_step``.
    A filter error ends the run; rows from the failing sample on stay NaN.
    """
    n = len(imu)
    observations = method is not None
    cfg = replace(cfg, method=method) if observations else cfg
    euler = np.full((n, 3), np.nan)
    q = np.full((n, 4), np.nan)
    drift = np.full((n, 3), np.nan)
    updated = np.zeros(n, bool)
    acc_ok = np.zeros(n, bool)
    mag_ok = np.zeros(n, bool)

    t0 = time.perf_counter()
    est = AhrsEstimator.from_static(imu, cfg, observations=observations)
    first = est.estimate()
    euler[0], q[0], drift[0] = first.euler, first.q, first.drift
    failed_at, error = None, ""
    for k in range(1, n):
        if observations and inject_step is not None and k == inject_step:
            est.inject_rank_deficiency()
        try:
            e = est.step(imu[k])
        except (FactorizationFailed, IllConditioned) as exc:
            failed_at, error = k, str(exc)
            break
        euler[k], q[k], drift[k] = e.euler, e.q, e.drift
        updated[k], acc_ok[k], mag_ok[k] = e.updated, e.accel_valid, e.mag_valid
    runtime = time.perf_counter() - t0
    return FilterRun(LABELS[method], euler, q, drift, updated, acc_ok, mag_ok, failed_at, error, runtime)


@dataclass
class Comparison:
    scenario: str
    t: np.ndarray
    truth: TruthSeries | None
    runs: list

    def reports(self) -> list:
        out = []
        for run in self.runs:
            if self.truth is not None:
                err = rmse(run.euler, self.truth.euler)
            else:
                err = np.full(3, np.nan)
            n_valid = int(np.count_nonzero(np.all(np.isfinite(run.euler), axis=1)))
            out.append(
                RmseReport(
                    self.scenario, run.label, err, n_valid, int(run.updated.sum()), run.status,
                    1e3 * run.runtime_s,
                )
            )
        return out


def compare(
    imu: ImuSeries,
    truth: TruthSeries | None,
    cfg: AhrsConfig,
    methods=(Method.CHOLESKY, Method.SVD),
    scenario: str = "scenario",
    inject_step: int | None = None,
    open_loop: bool = True,
) -> Comparison:
    """Feed the same stream to every requested filter (and the open-loop baseline).

    One filter failing never stops the others.
    """
    runs = [run_filter(imu, cfg, Method.parse(m), inject_step) for m in methods]
    if open_loop:
        runs.append(run_filter(imu, cfg, None))
    return Comparison(scenario, imu.t, truth, runs)


# ---------------------------------------------------------------------------
# Output


def _cell(x: float) -> str:
    return "nan" if not math.isfinite(x) else f"{x:.4f}"


def format_table(reports, timing: bool = False) -> str:
    """Plain-text RMSE table, one column per filter."""
    if not reports:
        return ""
    width = max(10, *(len(r.label) + 2 for r in reports), *(len(r.status) + 2 for r in reports))
    head = f"Attitude RMSE (deg) -- {reports[0].scenario}"
    lines = [head, "-" * len(head)]
    lines.append(f"{'Filter':<12}" + "".join(f"{r.label:>{width}}" for r in reports))
    for i, axis in enumerate(AXES):
        lines.append(f"{'RMSE_' + axis:<12}" + "".join(f"{_cell(r.rmse_deg[i]):>{width}}" for r in reports))
    lines.append(f"{'samples':<12}" + "".join(f"{r.n_samples:>{width}}" for r in reports))
    lines.append(f"{'updates':<12}" + "".join(f"{r.n_updates:>{width}}" for r in reports))
    lines.append(f"{'status':<12}" + "".join(f"{r.status:>{width}}" for r in reports))
    if timing:
        lines.append(f"{'runtime_ms':<12}" + "".join(f"{r.runtime_ms:>{width}.1f}" for r in reports))
    return "\n".join(lines) + "\n"


def report_csv(reports, timing: bool = False) -> str:
    cols = ["scenario", "filter", "status", "samples", "updates", "rmse_roll_deg", "rmse_pitch_deg", "rmse_yaw_deg"]
    if timing:
        cols.append("runtime_ms")
    buf = io.StringIO()
    buf.write(",".join(cols) + "\n")
    for r in reports:
        row = [r.scenario, r.label, r.status, str(r.n_samples), str(r.n_updates)]
        row += [_cell(v) for v in r.rmse_deg]
        if timing:
            row.append(f"{r.runtime_ms:.1f}")
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


def _slug(label: str) -> str:
    return label.lower().replace("-", "_")


def plot_csv(cmp: Comparison) -> str:
    """Per-sample angles in degrees (truth and every run) plus update flags."""
    cols = [cmp.t[:, None]]
    names = ["t"]
    if cmp.truth is not None:
        cols.append(np.degrees(cmp.truth.euler) + 0.0)
        names += [f"truth_{a}_deg" for a in AXES]
    for run in cmp.runs:
        cols.append(np.degrees(run.euler) + 0.0)
        cols.append(run.updated[:, None].astype(float))
        names += [f"{_slug(run.label)}_{a}_deg" for a in AXES] + [f"{_slug(run.label)}_updated"]
    buf = io.StringIO()
    buf.write(",".join(names) + "\n")
    np.savetxt(buf, np.hstack(cols), fmt="%.10g", delimiter=",")
    return buf.getvalue()


def estimates_csv(t: np.ndarray, run: FilterRun) -> str:
    """Estimator output in SI units (rad, rad/s)."""
    names = ["t", "roll", "pitch", "yaw", "qw", "qx", "qy", "qz", "bx", "by", "bz", "updated", "accel_valid", "mag_valid"]
    data = np.hstack(
        [
            t[:, None], run.euler, run.q, run.drift,
            run.updated[:, None], run.accel_valid[:, None], run.mag_valid[:, None],
        ]
    ).astype(float)
    buf = io.StringIO()
    buf.write(",".join(names) + "\n")
    np.savetxt(buf, data, fmt="%.15g", delimiter=",")
    return buf.getvalue()
