"""Third-degree cubature Kalman filter with a selectable covariance square root.

The filter is generic over the process and measurement models. Models work on
batches: ``f(X, u, dt)`` and ``h(X)`` receive an ``(m, n)`` array whose rows
are cubature points and return the propagated rows.

``Method.CHOLESKY`` gives the classic CKF; ``Method.SVD`` factorizes the
covariance by symmetric SVD (SVDCKF) and keeps running on covariances that
have lost positive definiteness.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .attitude import wrap_pi
from .linalg import EIG_FLOOR, Method, SqrtFactor, eigh_jacobi, inv_sym, sqrt_factor, symmetrize


@dataclass(frozen=True)
class CubatureSet:
    """Spherical-radial cubature points (rows of ``points``) and their weights."""

    points: np.ndarray
    weights: np.ndarray

    @property
    def m(self) -> int:
        return self.points.shape[0]


@functools.lru_cache(maxsize=32)
def cubature_points(n: int) -> CubatureSet:
    """The ``2n`` points ``+-sqrt(n) e_j`` with equal weights ``1/(2n)``.

    Returned arrays are read-only (the set is cached per dimension).
    """
    if n < 1:
        raise ValueError("dimension must be at least 1")
    eye = np.sqrt(n) * np.eye(n)
    # order: +e_1..+e_n, then -e_1..-e_n
    points = np.vstack((eye, -eye))
    weights = np.full(2 * n, 1.0 / (2 * n))
    points.flags.writeable = False
    weights.flags.writeable = False
    return CubatureSet(points, weights)


@dataclass(frozen=True)
class FilterState:
    """Mean ``x``, covariance ``P`` and step counter ``k``.

    ``factor`` caches the square root of ``P`` computed at the end of the last
    SVD-path step, so the next step does not factorize twice.
    """

    x: np.ndarray
    P: np.ndarray
    k: int = 0
    factor: SqrtFactor | None = None

    @property
    def n(self) -> int:
        return self.x.shape[0]


@dataclass
class ModelSpec:
    """State-space model ``x_k = f(x_{k-1}, u, dt) + w``, ``z_k = h(x_k) + v``.

    Attributes
    ----------
    f : callable
        Batched process function ``(X, u, dt) -> X'``.
    h : callable
        Batched measurement function ``X -> Z``.
    Q : ndarray or callable
        Process noise covariance, or ``Q(x, dt)`` returning it.
    R : ndarray
        Measurement noise covariance.
    angle_mask : ndarray of bool, optional
        Measurement components that are angles; their innovations and spreads
        are wrapped to (-pi, pi].
    normalize : callable, optional
        Applied to propagated points and to posterior means (rows of an
        ``(m, n)`` array), e.g. to renormalize a quaternion block.
    """

    f: Callable
    h: Callable
    Q: np.ndarray | Callable
    R: np.ndarray
    angle_mask: np.ndarray | None = None
    normalize: Callable | None = None

    def process_noise(self, x: np.ndarray, dt: float) -> np.ndarray:
        return self.Q(x, dt) if callable(self.Q) else np.asarray(self.Q, float)


def sigma_points(x: np.ndarray, factor: np.ndarray, cset: CubatureSet) -> np.ndarray:
    """Rows ``x + factor @ xi_i``."""
    return x[None, :] + cset.points @ factor.T


def _factor(state: FilterState, method: Method) -> SqrtFactor:
    if state.factor is not None and state.factor.method is method:
        return state.factor
    return sqrt_factor(state.P, method)


def _settle(x: np.ndarray, P: np.ndarray, k: int, method: Method) -> FilterState:
    P = symmetrize(P)
    if method is not Method.SVD:
        return FilterState(x, P, k)
    w, U = eigh_jacobi(P)
    if w[-1] < EIG_FLOOR:
        w = np.maximum(w, EIG_FLOOR)
        P = symmetrize((U * w[None, :]) @ U.T)
    return FilterState(x, P, k, SqrtFactor(U * np.sqrt(w)[None, :], method, U, w))


def _normalize_rows(model: ModelSpec, X: np.ndarray) -> np.ndarray:
    return X if model.normalize is None else model.normalize(X)


def predict(
    state: FilterState, model: ModelSpec, u, dt: float, method: Method | str = Method.SVD
) -> FilterState:
    """Time update.

    Raises
    ------
    FactorizationFailed
        On the Cholesky path when ``state.P`` is not positive definite.
    """
    method = Method.parse(method)
    cset = cubature_points(state.n)
    S = _factor(state, method)
    X = sigma_points(state.x, S.factor, cset)
    Xp = _normalize_rows(model, np.asarray(model.f(X, u, dt), dtype=float))
    x = Xp.mean(axis=0)
    x = _normalize_rows(model, x[None, :])[0]
    D = Xp - x[None, :]
    P = D.T @ D / cset.m + model.process_noise(x, dt)
    return _settle(x, P, state.k + 1, method)


def _measurement_moments(Z: np.ndarray, mask: np.ndarray | None):
    """Mean of the measurement points and their deviations, angle-aware for ``mask``."""
    if mask is None or not np.any(mask):
        z_hat = Z.mean(axis=0)
        return z_hat, Z - z_hat[None, :]
    ref = Z[0].copy()
    dev = Z - ref[None, :]
    dev[:, mask] = wrap_pi(dev[:, mask])
    shift = dev.mean(axis=0)
    z_hat = ref + shift
    return z_hat, dev - shift[None, :]


@dataclass(frozen=True)
class UpdateInfo:
    innovation: np.ndarray
    z_pred: np.ndarray
    Pzz: np.ndarray
    gain: np.ndarray


def update(
    state: FilterState,
    model: ModelSpec,
    z,
    method: Method | str = Method.SVD,
    return_info: bool = False,
):
    """Measurement update with observation ``z``.

    The innovation covariance is inverted through its eigendecomposition;
    see :func:`ckfahrs.linalg.inv_sym`.

    Raises
    ------
    FactorizationFailed
        Cholesky path, prior covariance not positive definite.
    IllConditioned
        Innovation covariance is singular or too badly conditioned.
    """
    method = Method.parse(method)
    z = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z)):
        raise ValueError("observation must be finite")
    cset = cubature_points(state.n)
    S = _factor(state, method)
    X = sigma_points(state.x, S.factor, cset)
    Z = np.asarray(model.h(X), dtype=float)
    if Z.shape[1] != z.shape[0]:
        raise ValueError(f"observation has {z.shape[0]} components, model produces {Z.shape[1]}")
    mask = None if model.angle_mask is None else np.asarray(model.angle_mask, bool)
    z_hat, dZ = _measurement_moments(Z, mask)
    dX = X - state.x[None, :]
    Pzz = symmetrize(dZ.T @ dZ / cset.m + np.asarray(model.R, float))
    Pxz = dX.T @ dZ / cset.m
    K = Pxz @ inv_sym(Pzz)
    nu = z - z_hat
    if mask is not None:
        nu[mask] = wrap_pi(nu[mask])
    x = state.x + K @ nu
    x = _normalize_rows(model, x[None, :])[0]
    P = state.P - K @ Pzz @ K.T
    new = _settle(x, P, state.k, method)
    if return_info:
        return new, UpdateInfo(nu, z_hat, Pzz, K)
    return new


class CubatureFilter:
    """Stateful wrapper around :func:`predict` / :func:`update` for one stream."""

    def __init__(self, model: ModelSpec, x0, P0, method: Method | str = Method.SVD):
        self.model = model
        self.method = Method.parse(method)
        self.state = FilterState(np.asarray(x0, float).copy(), symmetrize(np.asarray(P0, float)))
        self.last_info: UpdateInfo | None = None

    @property
    def x(self) -> np.ndarray:
        return self.state.x

    @property
    def P(self) -> np.ndarray:
        return self.state.P

    def predict(self, u, dt: float) -> FilterState:
        self.state = predict(self.state, self.model, u, dt, self.method)
        return self.state

    def update(self, z) -> FilterState:
        self.state, self.last_info = update(self.state, self.model, z, self.method, return_info=True)
        return self.state

    def set_covariance(self, P) -> None:
        """Replace the covariance (drops any cached factor)."""
        self.state = replace(self.state, P=np.asarray(P, float).copy(), factor=None)
