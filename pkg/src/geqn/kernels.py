"""Kernel backend selection.

The compiled extension ``geqn._ckernels`` is used when it imports; set
``GEQN_PURE_PYTHON=1`` to force the pure Python fallback. ``BACKEND``
names the active choice.
"""

import os

from . import _pykernels

LCP_SOLVED = _pykernels.LCP_SOLVED
LCP_RAY = _pykernels.LCP_RAY
LCP_CYCLE = _pykernels.LCP_CYCLE

_ck = None
if os.environ.get("GEQN_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _ck
    except ImportError:
        _ck = None

BACKEND = "compiled" if _ck is not None else "python"
_impl = _ck if _ck is not None else _pykernels


def backends():
    """Return ``{name: module}`` for every importable backend."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
        out["compiled"] = _ckernels
    except ImportError:
        pass
    return out


def lu_factor(a, tol):
    if getattr(a, "dtype", None) == object:
        return _pykernels.lu_factor(a, tol)
    return _impl.lu_factor(a, tol)


def lu_solve(lu, piv, b):
    if lu.dtype == object:
        return _pykernels.lu_solve(lu, piv, b)
    return _impl.lu_solve(lu, piv, b)


def lemke(M, q, max_pivots, eps=1e-12):
    return _impl.lemke(M, q, max_pivots, eps)
