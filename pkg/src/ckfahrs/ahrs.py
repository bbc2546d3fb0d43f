"""Seven-state IMU/MAG attitude estimator built on the cubature filter.

State vector: ``[qw, qx, qy, qz, drift_x, drift_y, drift_z]``. The quaternion
is propagated with the bias-corrected gyro increment and the drift decays as
a first-order Markov process. FastEuler angles are the 3-component
observation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .attitude import canonical, euler_rows, euler_to_quat, lift_matrix, quat_to_euler
from .cubature import CubatureFilter, ModelSpec
from .errors import InitFailed
from .fasteuler import GateConfig, fast_euler
from .linalg import Method
from .sensors import ImuSample, drift_decay

N_STATE = 7
N_OBS = 3


@dataclass
class AhrsConfig:
    """Estimator tuning.

    Noise parameters default to the simulator's sensor defaults, so the filter
    model matches synthetic data unless told otherwise.
    """

    sigma_white: float = 0.005  # gyro white noise, rad/s
    sigma_drift: float = 1e-4  # drift driving noise, rad/s/sqrt(s); covers turn-on bias
    tau_g: float = 300.0  # s
    obs_std: tuple = (math.radians(1.0), math.radians(1.0), math.radians(2.0))
    gate: GateConfig = field(default_factory=GateConfig)
    p0_quat: float = 0.05  # std of each quaternion component
    p0_drift: float = 0.02  # rad/s
    gimbal_guard: float = math.radians(85.0)
    drift_bound: float = 0.2  # rad/s
    update_every: int = 1
    init_samples: int = 100
    method: Method = Method.SVD

    def __post_init__(self):
        self.method = Method.parse(self.method)
        if min(self.sigma_white, self.sigma_drift, *self.obs_std) < 0.0:
            raise ValueError("noise terms must be non-negative")
        if not 0.0 < self.gimbal_guard < 0.5 * math.pi:
            raise ValueError("gimbal guard must lie in (0, pi/2)")
        if self.update_every < 1:
            raise ValueError("update_every must be >= 1")

    @property
    def R(self) -> np.ndarray:
        return np.diag(np.square(self.obs_std))

    @property
    def P0(self) -> np.ndarray:
        return np.diag([self.p0_quat**2] * 4 + [self.p0_drift**2] * 3)

    def process_noise(self, x: np.ndarray, dt: float) -> np.ndarray:
        """Gyro white noise lifted onto the quaternion block; drift noise on the drift block."""
        Q = np.zeros((N_STATE, N_STATE))
        M = lift_matrix(x[:4])
        Q[:4, :4] = (0.5 * self.sigma_white * dt) ** 2 * (M @ M.T)
        Q[4:, 4:] = self.sigma_drift**2 * dt * np.eye(3)
        return Q


def process_fn(x, u, dt: float, tau_g: float = 300.0) -> np.ndarray:
    """Propagate one state over ``dt`` with gyro reading ``u`` (deterministic part only)."""
    X = np.asarray(x, float).reshape(1, N_STATE)
    return _kernels.propagate(X, np.asarray(u, float), float(dt), drift_decay(tau_g, dt))[0]


def measurement_fn(x) -> np.ndarray:
    """Euler angles ``[roll, pitch, yaw]`` of the state's quaternion; the drift does not enter."""
    return quat_to_euler(np.asarray(x, float)[:4])


def _normalize_quat_rows(X: np.ndarray) -> np.ndarray:
    X = X.copy()
    X[:, :4] /= np.sqrt(np.sum(X[:, :4] ** 2, axis=1))[:, None]
    return X


def make_model(cfg: AhrsConfig) -> ModelSpec:
    def f(X, u, dt):
        return _kernels.propagate(
            np.ascontiguousarray(X), np.asarray(u, float), float(dt), drift_decay(cfg.tau_g, dt)
        )

    def h(X):
        return euler_rows(X[:, :4])

    return ModelSpec(
        f=f,
        h=h,
        Q=cfg.process_noise,
        R=cfg.R,
        angle_mask=np.array([True, True, True]),
        normalize=_normalize_quat_rows,
    )


@dataclass(frozen=True)
class AttitudeEstimate:
    t: float
    euler: np.ndarray
    q: np.ndarray
    drift: np.ndarray
    updated: bool
    accel_valid: bool
    mag_valid: bool


def init_static(samples, cfg: AhrsConfig | None = None, estimate_drift: bool = True) -> np.ndarray:
    """Initial state from a static stretch of samples.

    Accel and mag are averaged and converted with FastEuler; the drift is the
    mean gyro reading (zero when ``estimate_drift`` is False).

    Raises
    ------
    InitFailed
        If more than half the samples fail the accelerometer gate or the
        averaged sample is rejected.
    """
    cfg = cfg or AhrsConfig()
    samples = list(samples)
    if not samples:
        raise InitFailed("no samples to initialize from")
    gyro = np.array([s.gyro for s in samples], float)
    accel = np.array([s.accel for s in samples], float)
    mag = np.array([s.mag for s in samples], float)
    anorm = np.linalg.norm(accel, axis=1)
    rejected = np.count_nonzero(np.abs(anorm - cfg.gate.gravity) > cfg.gate.alpha)
    if rejected > 0.5 * len(samples):
        raise InitFailed(f"{rejected}/{len(samples)} samples fail the accelerometer gate")
    obs = fast_euler(accel.mean(axis=0), mag.mean(axis=0), cfg.gate)
    if not obs.valid:
        raise InitFailed("averaged accel/mag sample rejected by FastEuler gates")
    x0 = np.zeros(N_STATE)
    x0[:4] = euler_to_quat(obs.angles)
    if estimate_drift:
        x0[4:] = gyro.mean(axis=0)
    return x0


class AhrsEstimator:
    """FastEuler-driven cubature AHRS for one sensor stream.

    Parameters
    ----------
    cfg : AhrsConfig
    x0 : array_like, shape (7,)
        Initial state.
    P0 : ndarray, optional
        Initial covariance; defaults to ``cfg.P0``.
    observations : bool
        When False no filter runs at all: the mean is propagated with
        :func:`process_fn` (open-loop gyro integration).
    """

    def __init__(self, cfg: AhrsConfig, x0, P0=None, observations: bool = True):
        self.cfg = cfg
        self.observations = observations
        self.model = make_model(cfg)
        x0 = np.asarray(x0, float).copy()
        x0[:4] /= np.linalg.norm(x0[:4])
        self.filter = CubatureFilter(self.model, x0, cfg.P0 if P0 is None else P0, cfg.method)
        self._x = x0
        self.t: float | None = None
        self.n_steps = 0
        self.n_updates = 0

    @classmethod
    def from_static(cls, samples, cfg: AhrsConfig | None = None, **kwargs) -> "AhrsEstimator":
        cfg = cfg or AhrsConfig()
        samples = list(samples)[: cfg.init_samples]
        est = cls(cfg, init_static(samples, cfg), **kwargs)
        est.t = samples[0].t
        return est

    @property
    def x(self) -> np.ndarray:
        return self.filter.x if self.observations else self._x

    @property
    def P(self) -> np.ndarray:
        return self.filter.P

    def inject_rank_deficiency(self) -> None:
        """Zero the last row and column of P, leaving one exactly-zero eigenvalue."""
        P = self.filter.P.copy()
        P[-1, :] = 0.0
        P[:, -1] = 0.0
        self.filter.set_covariance(P)

    def estimate(self, updated=False, accel_valid=False, mag_valid=False) -> AttitudeEstimate:
        x = self.x
        q = canonical(x[:4])
        return AttitudeEstimate(
            t=self.t, euler=quat_to_euler(q), q=q, drift=x[4:].copy(),
            updated=updated, accel_valid=accel_valid, mag_valid=mag_valid,
        )

    def step(self, imu: ImuSample) -> AttitudeEstimate:
        """Predict with the gyro sample, then update with FastEuler angles when they pass every gate."""
        if self.t is not None:
            dt = imu.t - self.t
            if not dt > 0.0:
                raise ValueError(f"timestamps must increase (t={imu.t}, previous {self.t})")
        else:
            dt = 0.0
        self.t = imu.t
        self.n_steps += 1

        obs = fast_euler(imu.accel, imu.mag, self.cfg.gate)
        if not self.observations:
            if dt > 0.0:
                self._x = process_fn(self._x, imu.gyro, dt, self.cfg.tau_g)
            return self.estimate(False, obs.accel_valid, obs.mag_valid)

        if dt > 0.0:
            self.filter.predict(imu.gyro, dt)
        updated = False
        if obs.valid and self.n_steps % self.cfg.update_every == 0:
            pitch = measurement_fn(self.filter.x)[1]
            if abs(pitch) < self.cfg.gimbal_guard:
                self.filter.update(obs.angles)
                self._bound_drift()
                updated = True
                self.n_updates += 1
        return self.estimate(updated, obs.accel_valid, obs.mag_valid)

    def _bound_drift(self) -> None:
        drift = self.filter.state.x[4:]
        norm = np.linalg.norm(drift)
        if norm > self.cfg.drift_bound:
            x = self.filter.state.x.copy()
            x[4:] *= self.cfg.drift_bound / norm
            self.filter.state = replace(self.filter.state, x=x)
