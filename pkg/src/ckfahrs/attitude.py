"""Quaternion kinematics and Euler-angle conversions.

Conventions
-----------
* Quaternions are scalar-first ``[w, x, y, z]`` numpy arrays.
* A quaternion ``q`` describes the attitude of the body (front-right-down)
  frame relative to the navigation (north-east-down) frame: vectors map from
  body to navigation coordinates as ``v_n = q * v_b * conj(q)``.
* Euler angles are the aerospace Z-Y-X sequence ``(roll, pitch, yaw)`` with
  roll in (-pi, pi], pitch in [-pi/2, pi/2] and yaw in [0, 2*pi).
* Public operations return unit quaternions with ``w >= 0``.
"""

from __future__ import annotations

import math

import numpy as np

from . import _kernels

TWO_PI = 2.0 * math.pi
IDENTITY = np.array([1.0, 0.0, 0.0, 0.0])


def wrap_pi(angle):
    """Wrap angle(s) to (-pi, pi]."""
    a = np.asarray(angle, dtype=float)
    out = np.pi - np.mod(np.pi - a, TWO_PI)
    return float(out) if out.ndim == 0 else out


def wrap_2pi(angle):
    """Wrap angle(s) to [0, 2*pi)."""
    a = np.asarray(angle, dtype=float)
    out = np.mod(a, TWO_PI)
    out = np.where(out >= TWO_PI, 0.0, out)
    return float(out) if out.ndim == 0 else out


def normalize(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return q / np.linalg.norm(q)


def canonical(q: np.ndarray) -> np.ndarray:
    """Unit quaternion with non-negative scalar part (``q`` and ``-q`` are the same rotation)."""
    q = normalize(q)
    return -q if q[0] < 0.0 else q


def conj(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return np.array([q[0], -q[1], -q[2], -q[3]])


def hamilton(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Raw Hamilton product ``a * b`` without normalization or sign fixing."""
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ]
    )


def quat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Compose two rotations: the Hamilton product ``a * b``, renormalized and canonical."""
    return canonical(hamilton(np.asarray(a, float), np.asarray(b, float)))


def quat_inv(q: np.ndarray) -> np.ndarray:
    return canonical(conj(q))


def rotvec_to_quat(phi) -> np.ndarray:
    """Quaternion of the rotation vector ``phi`` (angular increment, rad).

    The rotation angle is ``|phi|``; below ``1e-8`` rad the ratio
    ``sin(|phi|/2)/|phi|`` is replaced by its series ``1/2 - |phi|^2/48``.
    """
    phi = np.asarray(phi, dtype=float)
    ang = math.sqrt(float(phi @ phi))
    if ang < _kernels.SMALL_ANGLE:
        k = 0.5 - ang * ang / 48.0
    else:
        k = math.sin(0.5 * ang) / ang
    return canonical(np.concatenate(([math.cos(0.5 * ang)], k * phi)))


def quat_to_dcm(q: np.ndarray) -> np.ndarray:
    """Rotation matrix ``C_b^n`` (body to navigation) of a unit quaternion."""
    w, x, y, z = normalize(q)
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def quat_rotate_vector(q: np.ndarray, v) -> np.ndarray:
    """Express body-frame vector ``v`` in the navigation frame."""
    return quat_to_dcm(q) @ np.asarray(v, dtype=float)


def rotate_to_body(q: np.ndarray, v) -> np.ndarray:
    """Express navigation-frame vector ``v`` in the body frame."""
    return quat_to_dcm(q).T @ np.asarray(v, dtype=float)


def quat_to_euler(q: np.ndarray) -> np.ndarray:
    """Z-Y-X Euler angles ``[roll, pitch, yaw]`` of a quaternion.

    Within 1e-6 rad of pitch = +-pi/2 roll is reported as 0 and yaw carries
    the remaining free angle.
    """
    e = _kernels.euler_rows(np.asarray(q, dtype=np.float64).reshape(1, 4))[0]
    if e[0] <= -math.pi:
        e[0] = math.pi
    return e


def euler_to_quat(roll, pitch=None, yaw=None) -> np.ndarray:
    """Quaternion of Z-Y-X Euler angles; accepts three scalars or one 3-vector."""
    if pitch is None and yaw is None:
        roll, pitch, yaw = np.asarray(roll, dtype=float)
    cr, sr = math.cos(0.5 * roll), math.sin(0.5 * roll)
    cp, sp = math.cos(0.5 * pitch), math.sin(0.5 * pitch)
    cy, sy = math.cos(0.5 * yaw), math.sin(0.5 * yaw)
    q = np.array(
        [
            cy * cp * cr + sy * sp * sr,
            cy * cp * sr - sy * sp * cr,
            cy * sp * cr + sy * cp * sr,
            sy * cp * cr - cy * sp * sr,
        ]
    )
    return canonical(q)


def euler_rows(Q: np.ndarray) -> np.ndarray:
    """Euler angles for every row of an ``(m, 4)`` quaternion array (rows need not be unit)."""
    return _kernels.euler_rows(np.ascontiguousarray(Q, dtype=np.float64))


def lift_matrix(q: np.ndarray) -> np.ndarray:
    """4x3 matrix ``M`` with ``q * [0, v] == M @ v``.

    A small body-frame rotation ``dtheta`` perturbs ``q`` by ``0.5 * M @ dtheta``.
    """
    w, x, y, z = q
    return np.array(
        [
            [-x, -y, -z],
            [w, -z, y],
            [z, w, -x],
            [-y, x, w],
        ]
    )


def euler_to_quat_rows(E: np.ndarray) -> np.ndarray:
    """Vectorized :func:`euler_to_quat` for an ``(m, 3)`` array of angles."""
    E = np.asarray(E, dtype=float)
    cr, sr = np.cos(0.5 * E[:, 0]), np.sin(0.5 * E[:, 0])
    cp, sp = np.cos(0.5 * E[:, 1]), np.sin(0.5 * E[:, 1])
    cy, sy = np.cos(0.5 * E[:, 2]), np.sin(0.5 * E[:, 2])
    Q = np.stack(
        (
            cy * cp * cr + sy * sp * sr,
            cy * cp * sr - sy * sp * cr,
            cy * sp * cr + sy * cp * sr,
            sy * cp * cr - cy * sp * sr,
        ),
        axis=1,
    )
    Q /= np.linalg.norm(Q, axis=1)[:, None]
    Q[Q[:, 0] < 0.0] *= -1.0
    return Q


def dcm_rows(Q: np.ndarray) -> np.ndarray:
    """Stack of body-to-navigation matrices, shape ``(m, 3, 3)``, for unit quaternion rows."""
    w, x, y, z = np.asarray(Q, dtype=float).T
    C = np.empty((len(w), 3, 3))
    C[:, 0, 0] = 1 - 2 * (y * y + z * z)
    C[:, 0, 1] = 2 * (x * y - w * z)
    C[:, 0, 2] = 2 * (x * z + w * y)
    C[:, 1, 0] = 2 * (x * y + w * z)
    C[:, 1, 1] = 1 - 2 * (x * x + z * z)
    C[:, 1, 2] = 2 * (y * z - w * x)
    C[:, 2, 0] = 2 * (x * z - w * y)
    C[:, 2, 1] = 2 * (y * z + w * x)
    C[:, 2, 2] = 1 - 2 * (x * x + y * y)
    return C
