"""Gyroscope error model and ideal accelerometer/magnetometer models.

The gyroscope output is the true rate plus a slowly varying drift and white
noise. The drift lumps any turn-on bias together with a first-order
Gauss-Markov process of correlation time ``tau_g``.

All noise enters through explicit standard-normal samples so that the
functions stay pure; :class:`NoiseSource` wraps a seeded generator for the
simulator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .attitude import rotate_to_body

GRAVITY = 9.80665
GRAVITY_NED = np.array([0.0, 0.0, GRAVITY])


@dataclass(frozen=True)
class ImuSample:
    """One timestamped body-frame sample: gyro [rad/s], specific force [m/s^2], unit magnetic field."""

    t: float
    gyro: np.ndarray
    accel: np.ndarray
    mag: np.ndarray


@dataclass
class GyroErrorState:
    """Random drift ``drift`` [rad/s] and the parameters of its model.

    Attributes
    ----------
    drift : ndarray, shape (3,)
        Current drift (turn-on bias included).
    tau_g : float
        Markov correlation time [s].
    sigma_drift : float
        Density of the noise driving the drift [rad/s/sqrt(s)].
    sigma_white : float
        Standard deviation of the white measurement noise [rad/s].
    """

    drift: np.ndarray = field(default_factory=lambda: np.zeros(3))
    tau_g: float = 300.0
    sigma_drift: float = 1e-5
    sigma_white: float = 0.005

    def __post_init__(self):
        self.drift = np.asarray(self.drift, dtype=float).reshape(3)
        if not self.tau_g > 0.0:
            raise ValueError("tau_g must be positive")
        if self.sigma_drift < 0.0 or self.sigma_white < 0.0:
            raise ValueError("noise levels must be non-negative")


@dataclass(frozen=True)
class MagReference:
    """Unit direction of the Earth magnetic field in NED coordinates."""

    direction: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0]))

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=float).reshape(3)
        n = np.linalg.norm(d)
        if not n > 0.0:
            raise ValueError("magnetic reference must be non-zero")
        object.__setattr__(self, "direction", d / n)

    @classmethod
    def from_angles(cls, inclination: float, declination: float = 0.0) -> "MagReference":
        """Field with the given dip (positive down) and declination, both in radians."""
        ci = math.cos(inclination)
        return cls(
            np.array(
                [ci * math.cos(declination), ci * math.sin(declination), math.sin(inclination)]
            )
        )


def drift_decay(tau_g: float, dt: float) -> float:
    return math.exp(-dt / tau_g)


def drift_step(drift, tau_g: float, dt: float, noise, sigma_drift: float = 1.0) -> np.ndarray:
    """Advance the Gauss-Markov drift by ``dt``.

    ``drift * exp(-dt/tau_g) + noise * sigma_drift * sqrt(dt)``, where ``noise``
    is a standard-normal 3-vector.
    """
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    return drift_decay(tau_g, dt) * np.asarray(drift, float) + np.asarray(
        noise, float
    ) * sigma_drift * math.sqrt(dt)


def gyro_measure(omega_true, err: GyroErrorState, white) -> np.ndarray:
    return np.asarray(omega_true, float) + err.drift + np.asarray(white, float) * err.sigma_white


def accel_measure(q, a_lin=None, noise=None, sigma: float = 1.0) -> np.ndarray:
    """Specific force in body axes for attitude ``q`` and NED linear acceleration ``a_lin``."""
    a = np.zeros(3) if a_lin is None else np.asarray(a_lin, float)
    f = rotate_to_body(q, a - GRAVITY_NED)
    if noise is not None:
        f = f + sigma * np.asarray(noise, float)
    return f


def mag_measure(q, ref: MagReference, noise=None, sigma: float = 1.0) -> np.ndarray:
    m = rotate_to_body(q, ref.direction)
    if noise is not None:
        m = m + sigma * np.asarray(noise, float)
    return m


@dataclass(frozen=True)
class NoiseConfig:
    """Sensor noise levels used by the simulator (defaults model a low-cost MEMS unit)."""

    gyro_white: float = 0.005  # rad/s
    gyro_drift: float = 1e-5  # rad/s/sqrt(s)
    tau_g: float = 300.0  # s
    gyro_bias: tuple = (0.002, -0.003, 0.0015)  # rad/s, constant turn-on bias
    accel: float = 0.05  # m/s^2
    mag: float = 0.01  # unit field

    @classmethod
    def noiseless(cls) -> "NoiseConfig":
        return cls(gyro_white=0.0, gyro_drift=0.0, gyro_bias=(0.0, 0.0, 0.0), accel=0.0, mag=0.0)


class NoiseSource:
    """Seeded standard-normal draws, one stream per simulated sensor unit."""

    def __init__(self, seed: int):
        self._rng = np.random.default_rng(seed)

    def normal3(self) -> np.ndarray:
        return self._rng.standard_normal(3)

    def block(self, n: int) -> np.ndarray:
        return self._rng.standard_normal((n, 3))
