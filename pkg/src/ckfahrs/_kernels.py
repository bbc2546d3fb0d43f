"""Numeric inner loops.

Every kernel has a ``*_loops`` form (scalar loops, compiled by numba) and a
``*_numpy`` form (vectorized numpy). The public names at the bottom of the
module are bound to one of them according to :mod:`ckfahrs._jit`.
"""

from __future__ import annotations

import math

import numpy as np

from ._jit import njit, select

# sin(a/2)/a switches to its Taylor series below this rotation angle [rad]
SMALL_ANGLE = 1e-8
# |pitch| closer than this to pi/2 is treated as gimbal lock
GIMBAL_EPS = 1e-6


# ---------------------------------------------------------------------------
# Cyclic Jacobi eigendecomposition of a symmetric matrix


def _rotation(app, aqq, apq):
    theta = (aqq - app) / (2.0 * apq)
    if abs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
        if theta < 0.0:
            t = -t
    c = 1.0 / math.sqrt(t * t + 1.0)
    return c, t * c


def _jacobi_eigh_loops(a, rtol, max_sweeps):
    n = a.shape[0]
    A = a.copy()
    V = np.eye(n)
    scale = 0.0
    for i in range(n):
        for j in range(n):
            scale += A[i, j] * A[i, j]
    scale = math.sqrt(scale)
    sweeps = 0
    while sweeps < max_sweeps:
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += A[i, j] * A[i, j]
        if math.sqrt(off) <= rtol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                c, s = _rotation_nb(A[p, p], A[q, q], apq)
                for k in range(n):
                    akp = A[k, p]
                    akq = A[k, q]
                    A[k, p] = c * akp - s * akq
                    A[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = A[p, k]
                    aqk = A[q, k]
                    A[p, k] = c * apk - s * aqk
                    A[q, k] = s * apk + c * aqk
                for k in range(n):
                    vkp = V[k, p]
                    vkq = V[k, q]
                    V[k, p] = c * vkp - s * vkq
                    V[k, q] = s * vkp + c * vkq
        sweeps += 1
    w = np.empty(n)
    for i in range(n):
        w[i] = A[i, i]
    return w, V, sweeps


def _jacobi_eigh_numpy(a, rtol, max_sweeps):
    n = a.shape[0]
    A = np.array(a, dtype=np.float64, copy=True)
    V = np.eye(n)
    scale = np.sqrt(np.sum(A * A))
    offmask = ~np.eye(n, dtype=bool)
    sweeps = 0
    while sweeps < max_sweeps:
        if np.sqrt(np.sum(A[offmask] ** 2)) <= rtol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                c, s = _rotation(A[p, p], A[q, q], apq)
                cols = A[:, [p, q]]
                A[:, p] = c * cols[:, 0] - s * cols[:, 1]
                A[:, q] = s * cols[:, 0] + c * cols[:, 1]
                rows = A[[p, q], :]
                A[p, :] = c * rows[0] - s * rows[1]
                A[q, :] = s * rows[0] + c * rows[1]
                vcols = V[:, [p, q]]
                V[:, p] = c * vcols[:, 0] - s * vcols[:, 1]
                V[:, q] = s * vcols[:, 0] + c * vcols[:, 1]
        sweeps += 1
    return np.diag(A).copy(), V, sweeps


# ---------------------------------------------------------------------------
# Cholesky, lower triangular. Returns (L, k) where k is the failing pivot
# index or -1 on success.


def _cholesky_loops(a):
    n = a.shape[0]
    L = np.zeros((n, n))
    for j in range(n):
        d = a[j, j]
        for k in range(j):
            d -= L[j, k] * L[j, k]
        if not d > 0.0:
            return L, j
        ljj = math.sqrt(d)
        L[j, j] = ljj
        for i in range(j + 1, n):
            s = a[i, j]
            for k in range(j):
                s -= L[i, k] * L[j, k]
            L[i, j] = s / ljj
    return L, -1


def _cholesky_numpy(a):
    n = a.shape[0]
    L = np.zeros((n, n))
    for j in range(n):
        d = a[j, j] - L[j, :j] @ L[j, :j]
        if not d > 0.0:
            return L, j
        ljj = math.sqrt(d)
        L[j, j] = ljj
        L[j + 1 :, j] = (a[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / ljj
    return L, -1


# ---------------------------------------------------------------------------
# AHRS process model over a batch of 7-element states [q(4), drift(3)]


def _propagate_loops(X, gyro, dt, decay):
    m = X.shape[0]
    out = np.empty_like(X)
    for i in range(m):
        px = (gyro[0] - X[i, 4]) * dt
        py = (gyro[1] - X[i, 5]) * dt
        pz = (gyro[2] - X[i, 6]) * dt
        ang = math.sqrt(px * px + py * py + pz * pz)
        if ang < SMALL_ANGLE:
            k = 0.5 - ang * ang / 48.0
        else:
            k = math.sin(0.5 * ang) / ang
        dw = math.cos(0.5 * ang)
        dx = k * px
        dy = k * py
        dz = k * pz
        w = X[i, 0]
        x = X[i, 1]
        y = X[i, 2]
        z = X[i, 3]
        rw = w * dw - x * dx - y * dy - z * dz
        rx = w * dx + x * dw + y * dz - z * dy
        ry = w * dy - x * dz + y * dw + z * dx
        rz = w * dz + x * dy - y * dx + z * dw
        nrm = math.sqrt(rw * rw + rx * rx + ry * ry + rz * rz)
        out[i, 0] = rw / nrm
        out[i, 1] = rx / nrm
        out[i, 2] = ry / nrm
        out[i, 3] = rz / nrm
        out[i, 4] = decay * X[i, 4]
        out[i, 5] = decay * X[i, 5]
        out[i, 6] = decay * X[i, 6]
    return out


def _propagate_numpy(X, gyro, dt, decay):
    phi = (gyro[None, :] - X[:, 4:7]) * dt
    ang = np.sqrt(np.sum(phi * phi, axis=1))
    safe = np.where(ang < SMALL_ANGLE, 1.0, ang)
    k = np.where(ang < SMALL_ANGLE, 0.5 - ang * ang / 48.0, np.sin(0.5 * safe) / safe)
    dw = np.cos(0.5 * ang)
    dx, dy, dz = (k[:, None] * phi).T
    w, x, y, z = X[:, 0], X[:, 1], X[:, 2], X[:, 3]
    q = np.stack(
        (
            w * dw - x * dx - y * dy - z * dz,
            w * dx + x * dw + y * dz - z * dy,
            w * dy - x * dz + y * dw + z * dx,
            w * dz + x * dy - y * dx + z * dw,
        ),
        axis=1,
    )
    out = np.empty_like(X)
    out[:, 0:4] = q / np.sqrt(np.sum(q * q, axis=1))[:, None]
    out[:, 4:7] = decay * X[:, 4:7]
    return out


# ---------------------------------------------------------------------------
# Z-Y-X Euler angles from rows of (not necessarily unit) quaternions


def _euler_rows_loops(Q):
    m = Q.shape[0]
    out = np.empty((m, 3))
    for i in range(m):
        nrm = math.sqrt(Q[i, 0] ** 2 + Q[i, 1] ** 2 + Q[i, 2] ** 2 + Q[i, 3] ** 2)
        w = Q[i, 0] / nrm
        x = Q[i, 1] / nrm
        y = Q[i, 2] / nrm
        z = Q[i, 3] / nrm
        c20 = 2.0 * (x * z - w * y)
        c21 = 2.0 * (y * z + w * x)
        c22 = 1.0 - 2.0 * (x * x + y * y)
        pitch = math.atan2(-c20, math.sqrt(c21 * c21 + c22 * c22))
        if abs(pitch) > 0.5 * math.pi - GIMBAL_EPS:
            roll = 0.0
            yaw = math.atan2(-2.0 * (x * y - w * z), 1.0 - 2.0 * (x * x + z * z))
        else:
            roll = math.atan2(c21, c22)
            yaw = math.atan2(2.0 * (x * y + w * z), 1.0 - 2.0 * (y * y + z * z))
        if yaw < 0.0:
            yaw += 2.0 * math.pi
        if yaw >= 2.0 * math.pi:
            yaw -= 2.0 * math.pi
        out[i, 0] = roll
        out[i, 1] = pitch
        out[i, 2] = yaw
    return out


def _euler_rows_numpy(Q):
    Q = Q / np.sqrt(np.sum(Q * Q, axis=1))[:, None]
    w, x, y, z = Q.T
    c20 = 2.0 * (x * z - w * y)
    c21 = 2.0 * (y * z + w * x)
    c22 = 1.0 - 2.0 * (x * x + y * y)
    pitch = np.arctan2(-c20, np.sqrt(c21 * c21 + c22 * c22))
    lock = np.abs(pitch) > 0.5 * np.pi - GIMBAL_EPS
    roll = np.where(lock, 0.0, np.arctan2(c21, c22))
    yaw = np.where(
        lock,
        np.arctan2(-2.0 * (x * y - w * z), 1.0 - 2.0 * (x * x + z * z)),
        np.arctan2(2.0 * (x * y + w * z), 1.0 - 2.0 * (y * y + z * z)),
    )
    yaw = np.where(yaw < 0.0, yaw + 2.0 * np.pi, yaw)
    yaw = np.where(yaw >= 2.0 * np.pi, yaw - 2.0 * np.pi, yaw)
    return np.stack((roll, pitch, yaw), axis=1)


_rotation_nb = njit(_rotation)
jacobi_eigh_nb = njit(_jacobi_eigh_loops)
cholesky_nb = njit(_cholesky_loops)
propagate_nb = njit(_propagate_loops)
euler_rows_nb = njit(_euler_rows_loops)

jacobi_eigh_np = _jacobi_eigh_numpy
cholesky_np = _cholesky_numpy
propagate_np = _propagate_numpy
euler_rows_np = _euler_rows_numpy

jacobi_eigh = select(jacobi_eigh_nb, jacobi_eigh_np)
cholesky = select(cholesky_nb, cholesky_np)
propagate = select(propagate_nb, propagate_np)
euler_rows = select(euler_rows_nb, euler_rows_np)
