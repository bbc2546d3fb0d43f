"""Covariance factorizations used by the cubature filter.

Matrices are plain ``numpy.ndarray`` objects. Two square-root factorizations
are provided, both normalized to the convention ``factor @ factor.T == P``:

* Cholesky (lower triangular), which fails on matrices that are not
  positive definite;
* symmetric SVD computed by cyclic Jacobi rotations, which clamps small or
  negative eigenvalues to :data:`EIG_FLOOR` and therefore always succeeds on
  finite symmetric input.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import FactorizationFailed, IllConditioned

EIG_FLOOR = 1e-12
JACOBI_RTOL = 1e-12
JACOBI_MAX_SWEEPS = 100
SYMMETRY_TOL = 1e-9
COND_MAX = 1e12


class Method(str, enum.Enum):
    """Covariance square-root method; selects CKF (Cholesky) or SVDCKF (SVD)."""

    CHOLESKY = "cholesky"
    SVD = "svd"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"ckf": cls.CHOLESKY, "svdckf": cls.SVD, "chol": cls.CHOLESKY}
        if key in aliases:
            return aliases[key]
        return cls(key)


@dataclass(frozen=True)
class SqrtFactor:
    """A matrix square root ``factor`` with ``factor @ factor.T`` equal to the source.

    For the SVD method ``U`` and ``S`` hold the (clamped) eigendecomposition the
    factor was built from.
    """

    factor: np.ndarray
    method: Method
    U: np.ndarray | None = None
    S: np.ndarray | None = None

    def reconstruct(self) -> np.ndarray:
        return self.factor @ self.factor.T


def symmetrize(P: np.ndarray) -> np.ndarray:
    return 0.5 * (P + P.T)


def _check_square_finite(P: np.ndarray) -> np.ndarray:
    P = np.asarray(P, dtype=np.float64)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {P.shape}")
    if not np.all(np.isfinite(P)):
        raise FactorizationFailed("matrix contains non-finite entries")
    return P


def _check_symmetric(P: np.ndarray) -> None:
    scale = max(np.max(np.abs(P)), np.finfo(float).tiny)
    asym = np.max(np.abs(P - P.T))
    if asym > SYMMETRY_TOL * scale:
        raise ValueError(f"matrix is not symmetric (max|P - P^T| / max|P| = {asym / scale:.3g})")


def eigh_jacobi(P: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unclamped eigendecomposition of symmetric ``P``, eigenvalues descending.

    Returns ``(w, V)`` with ``V @ diag(w) @ V.T == P``.
    """
    P = _check_square_finite(P)
    _check_symmetric(P)
    w, V, _ = _kernels.jacobi_eigh(symmetrize(P), JACOBI_RTOL, JACOBI_MAX_SWEEPS)
    order = np.argsort(-w, kind="stable")
    return w[order], np.ascontiguousarray(V[:, order])


def sym_svd(P: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Singular value decomposition of a symmetric matrix, ``P = U diag(S) U^T``.

    Because ``P`` is symmetric the left and right singular vectors coincide, so
    only ``U`` is returned. Eigenvalues below :data:`EIG_FLOOR` (including
    negative ones from an indefinite input) are raised to the floor.

    Parameters
    ----------
    P : ndarray, shape (n, n)
        Symmetric matrix with finite entries.

    Returns
    -------
    U : ndarray, shape (n, n)
        Orthogonal matrix of singular vectors.
    S : ndarray, shape (n,)
        Singular values, sorted descending, all ``>= EIG_FLOOR``.

    Raises
    ------
    FactorizationFailed
        If ``P`` contains NaN or Inf.
    ValueError
        If ``P`` is not square or not symmetric.
    """
    w, U = eigh_jacobi(P)
    return U, np.maximum(w, EIG_FLOOR)


def cholesky(P: np.ndarray) -> np.ndarray:
    """Lower-triangular ``L`` with ``L @ L.T == P``.

    Raises
    ------
    FactorizationFailed
        If ``P`` is not (numerically) positive definite. The failing pivot is
        stored in the exception's ``index`` attribute.
    """
    P = _check_square_finite(P)
    _check_symmetric(P)
    L, k = _kernels.cholesky(symmetrize(P))
    if k >= 0:
        raise FactorizationFailed(f"matrix is not positive definite (pivot {k})", index=k)
    return L


def sqrt_factor(P: np.ndarray, method: Method | str) -> SqrtFactor:
    """Square-root factor of a covariance using the requested method.

    The SVD factor is ``U @ diag(sqrt(S))``; its reconstruction equals ``P``
    after eigenvalue clamping.
    """
    method = Method.parse(method)
    if method is Method.CHOLESKY:
        return SqrtFactor(cholesky(P), method)
    U, S = sym_svd(P)
    return SqrtFactor(U * np.sqrt(S)[None, :], method, U, S)


def inv_sym(A: np.ndarray, cond_max: float = COND_MAX) -> np.ndarray:
    """Inverse of a symmetric positive definite matrix through its eigendecomposition.

    Raises
    ------
    IllConditioned
        If ``A`` has a non-positive eigenvalue or a condition number above
        ``cond_max``.
    """
    w, U = eigh_jacobi(A)
    if not w[-1] > 0.0 or w[0] / w[-1] > cond_max:
        raise IllConditioned(
            f"cannot invert matrix with eigenvalue range [{w[-1]:.3g}, {w[0]:.3g}]"
        )
    return (U / w[None, :]) @ U.T
