"""Trajectory generation, sensor synthesis and CSV replay.

Trajectories are analytic Euler-angle profiles, so the body rates and the
attitude truth are exact and mutually consistent. Each dynamic profile starts
with a static hold (``lead_in``) followed by a smooth ramp-in, which lets the
estimator initialize from a static stretch.

CSV layout (header required, ``#`` comment lines allowed)::

    t,gx,gy,gz,ax,ay,az,mx,my,mz[,roll,pitch,yaw]

SI units throughout: s, rad/s, m/s^2, unit magnetic field, rad.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .attitude import dcm_rows, euler_to_quat_rows, wrap_2pi
from .errors import DataError, FormatError
from .sensors import GRAVITY_NED, ImuSample, MagReference, NoiseConfig

IMU_COLUMNS = ("t", "gx", "gy", "gz", "ax", "ay", "az", "mx", "my", "mz")
TRUTH_COLUMNS = ("roll", "pitch", "yaw")
CSV_FORMAT = "%.15g"

DEFAULT_MAG = MagReference.from_angles(math.radians(60.0), 0.0)


class Profile(str, enum.Enum):
    STATIC = "static"
    LOW_DYNAMIC = "low_dynamic"
    HIGH_DYNAMIC = "high_dynamic"
    CUSTOM = "custom"


@dataclass(frozen=True)
class Scenario:
    """Simulation setup.

    ``waypoints`` (custom profile only) is a sequence of
    ``(t, roll, pitch, yaw)`` rows in seconds and radians; the attitude is a
    cubic spline through them.
    """

    name: str = "low_dynamic"
    duration: float = 120.0
    rate: float = 100.0
    profile: Profile = Profile.LOW_DYNAMIC
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    seed: int = 42
    mag_ref: MagReference = DEFAULT_MAG
    lead_in: float = 2.0
    ramp: float = 5.0
    initial_yaw: float = math.radians(30.0)
    waypoints: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "profile", Profile(self.profile))
        if not 10.0 <= self.rate <= 1000.0:
            raise ValueError("rate must lie in [10, 1000] Hz")
        if not self.duration > 0.0:
            raise ValueError("duration must be positive")
        if self.profile is Profile.CUSTOM and len(self.waypoints) < 2:
            raise ValueError("custom profile needs at least two waypoints")

    @property
    def dt(self) -> float:
        return 1.0 / self.rate

    @property
    def n_samples(self) -> int:
        return int(round(self.duration * self.rate)) + 1


# ---------------------------------------------------------------------------
# Series containers


@dataclass
class ImuSeries:
    t: np.ndarray
    gyro: np.ndarray
    accel: np.ndarray
    mag: np.ndarray

    def __len__(self) -> int:
        return len(self.t)

    def __getitem__(self, k):
        if isinstance(k, slice):
            return ImuSeries(self.t[k], self.gyro[k], self.accel[k], self.mag[k])
        return ImuSample(float(self.t[k]), self.gyro[k], self.accel[k], self.mag[k])

    def __iter__(self):
        for k in range(len(self)):
            yield self[k]


@dataclass
class TruthSeries:
    """Attitude truth. ``omega`` and ``a_lin`` are absent for replayed logs."""

    t: np.ndarray
    euler: np.ndarray
    q: np.ndarray
    omega: np.ndarray | None = None
    a_lin: np.ndarray | None = None
    gyro_rate: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.t)

    @classmethod
    def from_euler(cls, t, euler) -> "TruthSeries":
        euler = np.asarray(euler, float)
        return cls(np.asarray(t, float), euler, euler_to_quat_rows(euler))


# ---------------------------------------------------------------------------
# Analytic profiles


def _ramp(t, lead, T):
    """Quintic smoothstep envelope, its derivative and its integral from 0 to ``t``."""
    u = np.clip((t - lead) / T, 0.0, 1.0)
    e = u**3 * (10.0 - 15.0 * u + 6.0 * u * u)
    de = np.where((u > 0.0) & (u < 1.0), 30.0 * u * u * (1.0 - u) ** 2 / T, 0.0)
    after = np.maximum(t - lead - T, 0.0)
    E = T * (u**6 - 3.0 * u**5 + 2.5 * u**4) + after
    return e, de, E


@dataclass(frozen=True)
class _Wave:
    amp: float
    freq: float
    phase: float = 0.0


class Trajectory:
    """Continuous-time attitude ``euler(t)``, Euler rates and NED linear acceleration."""

    def __init__(self, scenario: Scenario):
        self.s = scenario
        p = scenario.profile
        self._spline = None
        self.roll = self.pitch = _Wave(0.0, 0.0)
        self.yaw_rate = 0.0
        self.yaw_wave = _Wave(0.0, 0.0)
        self.accel_waves = (_Wave(0.0, 0.0),) * 3
        if p is Profile.LOW_DYNAMIC:
            self.roll = _Wave(math.radians(10.0), 0.10)
            self.pitch = _Wave(math.radians(10.0), 0.07, 0.6)
            self.yaw_rate = math.radians(10.0)
        elif p is Profile.HIGH_DYNAMIC:
            self.roll = _Wave(math.radians(45.0), 0.40)
            self.pitch = _Wave(math.radians(45.0), 0.25, 0.8)
            self.yaw_rate = math.radians(30.0)
            self.yaw_wave = _Wave(math.radians(20.0), 0.20, 0.3)
            self.accel_waves = (_Wave(1.0, 0.15), _Wave(1.0, 0.11, 0.3), _Wave(17.0, 0.30, 1.1))
        elif p is Profile.CUSTOM:
            from scipy.interpolate import CubicSpline

            wp = np.asarray(scenario.waypoints, float)
            ang = wp[:, 1:4].copy()
            ang[:, 2] = np.unwrap(ang[:, 2])
            self._spline = CubicSpline(wp[:, 0], ang, bc_type="clamped")
            self._dspline = self._spline.derivative()

    def _wave(self, w: _Wave, t, e, de):
        tau = t - self.s.lead_in
        arg = 2.0 * math.pi * w.freq * tau + w.phase
        base = np.sin(arg)
        dbase = 2.0 * math.pi * w.freq * np.cos(arg)
        return w.amp * e * base, w.amp * (de * base + e * dbase)

    def euler_and_rates(self, t):
        """Euler angles (unwrapped yaw) and their time derivatives at times ``t``."""
        t = np.atleast_1d(np.asarray(t, float))
        if self._spline is not None:
            tc = np.clip(t, self._spline.x[0], self._spline.x[-1])
            inside = (t >= self._spline.x[0]) & (t <= self._spline.x[-1])
            return self._spline(tc), self._dspline(tc) * inside[:, None]
        e, de, E = _ramp(t, self.s.lead_in, self.s.ramp)
        roll, droll = self._wave(self.roll, t, e, de)
        pitch, dpitch = self._wave(self.pitch, t, e, de)
        ywave, dywave = self._wave(self.yaw_wave, t, e, de)
        yaw = self.s.initial_yaw + self.yaw_rate * E + ywave
        dyaw = self.yaw_rate * e + dywave
        return np.stack((roll, pitch, yaw), axis=1), np.stack((droll, dpitch, dyaw), axis=1)

    def omega(self, t) -> np.ndarray:
        """Body angular rate [rad/s] at times ``t`` (Z-Y-X kinematics)."""
        ang, rates = self.euler_and_rates(t)
        return euler_rates_to_body(ang, rates)

    def a_lin(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, float))
        e, de, _ = _ramp(t, self.s.lead_in, self.s.ramp)
        return np.stack([self._wave(w, t, e, de)[0] for w in self.accel_waves], axis=1)


def euler_rates_to_body(ang: np.ndarray, rates: np.ndarray) -> np.ndarray:
    roll, pitch = ang[:, 0], ang[:, 1]
    dr, dp, dy = rates.T
    sr, cr = np.sin(roll), np.cos(roll)
    sp, cp = np.sin(pitch), np.cos(pitch)
    return np.stack((dr - dy * sp, dp * cr + dy * sr * cp, -dp * sr + dy * cr * cp), axis=1)


def gen_trajectory(s: Scenario) -> TruthSeries:
    """Sampled truth for ``s``.

    ``gyro_rate`` holds the rate an ideal gyro reports at each sample: the
    body rate at the midpoint of the preceding sample interval.
    """
    traj = Trajectory(s)
    t = np.arange(s.n_samples) * s.dt
    ang, rates = traj.euler_and_rates(t)
    omega = euler_rates_to_body(ang, rates)
    gyro_rate = omega.copy()
    gyro_rate[1:] = traj.omega(t[1:] - 0.5 * s.dt)
    euler = ang.copy()
    euler[:, 2] = wrap_2pi(euler[:, 2])
    return TruthSeries(t, euler, euler_to_quat_rows(ang), omega, traj.a_lin(t), gyro_rate)


def synthesize(truth: TruthSeries, noise: NoiseConfig, seed: int, mag_ref: MagReference = DEFAULT_MAG) -> ImuSeries:
    """Sensor stream for ``truth`` under the gyro error model and noisy accel/mag.

    The gyro error is a constant turn-on bias plus a Gauss-Markov drift
    starting from zero plus white noise.

    Draw order is fixed (gyro white, drift driving noise, accel, mag), so a
    seed reproduces the stream bit for bit.
    """
    n = len(truth)
    rng = np.random.default_rng(seed)
    w_gyro = rng.standard_normal((n, 3))
    w_drift = rng.standard_normal((n, 3))
    w_acc = rng.standard_normal((n, 3))
    w_mag = rng.standard_normal((n, 3))

    drift = np.zeros((n, 3))
    dts = np.diff(truth.t)
    for k in range(1, n):
        dt = dts[k - 1]
        drift[k] = math.exp(-dt / noise.tau_g) * drift[k - 1] + w_drift[k] * noise.gyro_drift * math.sqrt(dt)

    rate = truth.gyro_rate if truth.gyro_rate is not None else truth.omega
    gyro = rate + np.asarray(noise.gyro_bias, float) + drift + noise.gyro_white * w_gyro

    Cbn = dcm_rows(truth.q)
    a_lin = truth.a_lin if truth.a_lin is not None else np.zeros((n, 3))
    accel = np.einsum("kji,kj->ki", Cbn, a_lin - GRAVITY_NED) + noise.accel * w_acc
    mag = np.einsum("kji,j->ki", Cbn, mag_ref.direction) + noise.mag * w_mag
    return ImuSeries(truth.t.copy(), gyro, accel, mag)


def simulate(s: Scenario) -> tuple[ImuSeries, TruthSeries]:
    truth = gen_trajectory(s)
    return synthesize(truth, s.noise, s.seed, s.mag_ref), truth


# ---------------------------------------------------------------------------
# CSV


def write_csv(path, imu: ImuSeries, truth: TruthSeries | None = None) -> None:
    cols = [imu.t[:, None], imu.gyro, imu.accel, imu.mag]
    header = list(IMU_COLUMNS)
    if truth is not None:
        if len(truth) != len(imu):
            raise ValueError("truth and IMU series differ in length")
        cols.append(truth.euler)
        header += TRUTH_COLUMNS
    data = np.hstack(cols)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        np.savetxt(fh, data, fmt=CSV_FORMAT, delimiter=",")


def load_csv(path) -> tuple[ImuSeries, TruthSeries | None]:
    """Read a sensor log.

    Raises
    ------
    FormatError
        Missing/unknown header, wrong column counts or unparsable numbers
        (the message lists the offending line numbers).
    DataError
        Non-finite values or timestamps that do not strictly increase.
    """
    header = None
    rows: list[list[float]] = []
    lines: list[int] = []
    bad: list[int] = []
    with open(Path(path), encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = [c.strip().lower() for c in line.split(",")]
                if tuple(header) not in (IMU_COLUMNS, IMU_COLUMNS + TRUTH_COLUMNS):
                    raise FormatError(
                        f"line {lineno}: header must be {','.join(IMU_COLUMNS)}[,{','.join(TRUTH_COLUMNS)}]"
                    )
                continue
            fields = line.split(",")
            try:
                if len(fields) != len(header):
                    raise ValueError
                rows.append([float(v) for v in fields])
                lines.append(lineno)
            except ValueError:
                bad.append(lineno)
    if header is None:
        raise FormatError(f"{path}: no header line")
    if bad:
        shown = ", ".join(str(b) for b in bad[:10])
        raise FormatError(f"{path}: {len(bad)} malformed row(s) at line(s) {shown}")
    if not rows:
        raise FormatError(f"{path}: no data rows")
    data = np.array(rows)
    finite = np.all(np.isfinite(data), axis=1)
    if not finite.all():
        raise DataError(f"{path}: non-finite value at line {lines[int(np.argmin(finite))]}")
    dt = np.diff(data[:, 0])
    if np.any(dt <= 0.0):
        first = int(np.argmax(dt <= 0.0)) + 1
        raise DataError(f"{path}: time does not increase at line {lines[first]}")
    imu = ImuSeries(data[:, 0], data[:, 1:4], data[:, 4:7], data[:, 7:10])
    truth = TruthSeries.from_euler(data[:, 0], data[:, 10:13]) if data.shape[1] == 13 else None
    return imu, truth
