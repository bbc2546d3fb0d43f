"""Kernel backend selection.

Hot kernels exist twice: an explicit-loop version compiled with numba and a
vectorized pure-numpy version. Setting ``CKFAHRS_DISABLE_NUMBA=1`` in the
environment (before import) forces the numpy path; it is also used when numba
is not installed.
"""

from __future__ import annotations

import os

ENV_FLAG = "CKFAHRS_DISABLE_NUMBA"

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


def _disabled_by_env() -> bool:
    return os.environ.get(ENV_FLAG, "").strip().lower() in ("1", "true", "yes", "on")


HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and not _disabled_by_env()
BACKEND = "numba" if USE_NUMBA else "numpy"


def njit(func):
    """Compile ``func`` with numba when available; otherwise return it unchanged."""
    if numba is None:
        return func
    return numba.njit(cache=True, nogil=True)(func)


def select(numba_impl, numpy_impl):
    return numba_impl if USE_NUMBA else numpy_impl
