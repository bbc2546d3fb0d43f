"""FastEuler: roll, pitch and tilt-compensated yaw from a single accel/mag sample.

The accelerometer provides roll and pitch when its magnitude is close to
gravity; the magnetometer, de-rotated into the local level frame with those
angles, provides yaw. Samples failing either gate are flagged rather than
rejected with an exception, so the caller can skip the measurement update.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sensors import GRAVITY

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class GateConfig:
    """Validity gates.

    Attributes
    ----------
    alpha : float
        Accepted deviation of ``|accel|`` from ``g`` [m/s^2].
    mag_min, mag_max : float
        Accepted band of ``|mag|`` relative to the reference field norm.
    mag_norm : float
        Reference field norm (1 for a normalized magnetometer).
    exact_pitch : bool
        Use ``atan2(ax, sqrt(ay^2 + az^2))`` for pitch. When False the
        two-argument ``atan2(ax, -az)`` form is used, which is exact only at
        zero roll.
    """

    alpha: float = 0.5
    mag_min: float = 0.5
    mag_max: float = 1.5
    mag_norm: float = 1.0
    gravity: float = GRAVITY
    exact_pitch: bool = True

    def __post_init__(self):
        if not self.alpha > 0.0:
            raise ValueError("alpha must be positive")
        if not 0.0 < self.mag_min < self.mag_max:
            raise ValueError("mag band must satisfy 0 < mag_min < mag_max")


@dataclass(frozen=True)
class EulerObservation:
    """Result of :func:`fast_euler`. ``angles`` is None unless both flags are set."""

    angles: np.ndarray | None
    accel_valid: bool
    mag_valid: bool
    roll_pitch: tuple | None = None

    @property
    def valid(self) -> bool:
        return self.accel_valid and self.mag_valid


def fast_euler(accel, mag, cfg: GateConfig = GateConfig()) -> EulerObservation:
    """Convert one accel/mag sample into an ``[roll, pitch, yaw]`` pseudo-measurement.

    Parameters
    ----------
    accel : array_like, shape (3,)
        Specific force in body axes [m/s^2]; reads ``[0, 0, -g]`` when level.
    mag : array_like, shape (3,)
        Magnetic field in body axes.
    cfg : GateConfig
        Gate thresholds.

    Returns
    -------
    EulerObservation
        Yaw is in [0, 2*pi). ``roll_pitch`` is filled whenever the accel gate
        passes, even if the magnetometer is rejected.
    """
    ax, ay, az = (float(v) for v in accel)
    mx, my, mz = (float(v) for v in mag)

    anorm = math.sqrt(ax * ax + ay * ay + az * az)
    if anorm == 0.0 or abs(anorm - cfg.gravity) > cfg.alpha:
        return EulerObservation(None, False, False)
    roll = math.atan2(-ay, -az)
    if cfg.exact_pitch:
        pitch = math.atan2(ax, math.sqrt(ay * ay + az * az))
    else:
        pitch = math.atan2(ax, -az)

    mnorm = math.sqrt(mx * mx + my * my + mz * mz) / cfg.mag_norm
    if mnorm == 0.0 or not cfg.mag_min <= mnorm <= cfg.mag_max:
        return EulerObservation(None, True, False, (roll, pitch))

    sr, cr = math.sin(roll), math.cos(roll)
    sp, cp = math.sin(pitch), math.cos(pitch)
    hx = mx * cp + my * sp * sr + mz * sp * cr
    hy = my * cr - mz * sr
    yaw = math.atan2(-hy, hx)
    if yaw < 0.0:
        yaw += TWO_PI
    if yaw >= TWO_PI:
        yaw -= TWO_PI
    return EulerObservation(np.array([roll, pitch, yaw]), True, True, (roll, pitch))
