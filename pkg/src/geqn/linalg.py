"""Dense small-matrix helpers built on the LU kernel."""

import numpy as np

from . import kernels
from .errors import SingularMatrixError

#: relative pivot threshold: a pivot below ``PIVOT_RTOL * ||M||`` is singular
PIVOT_RTOL = 1e-12


def spectral_norm(a):
    """Operator 2-norm (largest singular value); 0 for empty matrices."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def _threshold(a):
    if a.dtype == object:
        return 0
    return PIVOT_RTOL * max(np.abs(a).max(initial=0.0), np.finfo(float).tiny)


def lu(a):
    """Factor ``a``; raises :class:`SingularMatrixError` below the pivot threshold."""
    a = np.asarray(a)
    if a.dtype != object:
        a = a.astype(float)
    lu_, piv, info = kernels.lu_factor(a, _threshold(a))
    if info >= 0:
        raise SingularMatrixError(f"matrix is singular (pivot {info} below threshold)")
    return lu_, piv


def solve(a, b):
    """Solve ``a x = b`` by LU with partial pivoting.

    Works for ``float`` and ``object`` (e.g. ``Fraction``) arrays; the latter
    always use the Python kernel and an exact-zero singularity test.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape[0] == 0:
        return b.copy()
    if a.dtype != object and b.dtype != object:
        a = a.astype(float)
        b = b.astype(float)
    lu_, piv = lu(a)
    return kernels.lu_solve(lu_, piv, b)


def inv(a):
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    lu_, piv = lu(a)
    return np.column_stack([kernels.lu_solve(lu_, piv, e) for e in np.eye(n)])


def inverse_norm(a):
    """``||a^{-1}||_2``; raises :class:`SingularMatrixError` when singular."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.size == 0:
        return 0.0
    inv(a)  # singularity check under the package pivot rule
    smin = np.linalg.svd(a, compute_uv=False).min()
    return float(1.0 / smin)
