"""Polyhedral convex sets ``C`` and Euclidean projection onto them.

``F`` in the generalized equation is either the zero map or the normal cone
``N_C`` of one of these sets.
"""

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import linalg
from .errors import InfeasibleError, SingularMatrixError

MAX_POLY_CONSTRAINTS = 12
FEAS_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SetDescriptor:
    """One of ``zero``, ``orthant``, ``box`` or ``polyhedron`` (``{x : A x <= b}``)."""

    kind: str
    n: int
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None
    A: Optional[np.ndarray] = None
    b: Optional[np.ndarray] = None

    @classmethod
    def zero(cls, n):
        return cls("zero", int(n))

    @classmethod
    def orthant(cls, n):
        return cls("orthant", int(n))

    @classmethod
    def box(cls, lower, upper):
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)
        if lower.shape != upper.shape or lower.ndim != 1:
            raise ValueError("box bounds must be vectors of equal length")
        if np.any(lower > upper):
            raise ValueError("box requires lower <= upper componentwise")
        return cls("box", lower.size, lower=lower, upper=upper)

    @classmethod
    def polyhedron(cls, A, b):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.atleast_1d(np.asarray(b, dtype=float))
        if A.shape[0] < 1 or A.shape[0] != b.size:
            raise ValueError(f"polyhedron needs m >= 1 rows with matching b, got A{A.shape}, b{b.shape}")
        return cls("polyhedron", A.shape[1], A=A, b=b)

    def __eq__(self, other):
        if not isinstance(other, SetDescriptor) or (self.kind, self.n) != (other.kind, other.n):
            return False
        for name in ("lower", "upper", "A", "b"):
            a, c = getattr(self, name), getattr(other, name)
            if (a is None) != (c is None) or (a is not None and not np.array_equal(a, c)):
                return False
        return True

    __hash__ = None

    def contains(self, x, tol=FEAS_TOL):
        x = np.asarray(x, dtype=float)
        if self.kind == "zero":
            return True
        if self.kind == "orthant":
            return bool(np.all(x >= -tol))
        if self.kind == "box":
            return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))
        return bool(np.all(self.A @ x <= self.b + tol))

    def as_inequalities(self):
        """``(A, b)`` with ``C = {x : A x <= b}``; infinite box bounds are dropped."""
        n = self.n
        if self.kind == "orthant":
            return -np.eye(n), np.zeros(n)
        if self.kind == "box":
            rows, rhs = [], []
            for i in range(n):
                if math.isfinite(self.lower[i]):
                    rows.append(-np.eye(n)[i])
                    rhs.append(-self.lower[i])
                if math.isfinite(self.upper[i]):
                    rows.append(np.eye(n)[i])
                    rhs.append(self.upper[i])
            return np.array(rows).reshape(-1, n), np.array(rhs)
        if self.kind == "polyhedron":
            return self.A, self.b
        return np.zeros((0, n)), np.zeros(0)

    def vertices_or_probes(self, center, radius=1.0, count=32, seed=0):
        """Points of ``C`` used to spot-check projection optimality."""
        rng = np.random.default_rng(seed)
        pts = center + radius * rng.standard_normal((count, self.n))
        return np.array([project(self, p) for p in pts])


def project(cset, v):
    """Euclidean projection of ``v`` onto ``cset``.

    Polyhedra use active-set enumeration over at most
    ``MAX_POLY_CONSTRAINTS`` constraints: the first subset whose KKT point is
    feasible with nonnegative multipliers is the (unique) projection.

    Raises
    ------
    InfeasibleError
        When the polyhedron is empty.
    """
    v = np.asarray(v, dtype=float)
    if cset.kind == "zero":
        raise ValueError("the zero map has no associated set to project on")
    if cset.kind == "orthant":
        return np.maximum(v, 0.0)
    if cset.kind == "box":
        return np.clip(v, cset.lower, cset.upper)
    return _project_polyhedron(cset.A, cset.b, v)


def _project_polyhedron(A, b, v):
    m = A.shape[0]
    if m > MAX_POLY_CONSTRAINTS:
        raise ValueError(f"polyhedron projection supports m <= {MAX_POLY_CONSTRAINTS}, got {m}")
    scale = 1.0 + np.abs(b).max() + np.abs(A).max() * np.abs(v).max()
    tol = FEAS_TOL * scale
    if np.all(A @ v <= b + tol):
        return v.copy()
    for size in range(1, min(m, A.shape[1]) + 1):
        for active in itertools.combinations(range(m), size):
            Ai = A[list(active)]
            try:
                mu = linalg.solve(Ai @ Ai.T, Ai @ v - b[list(active)])
            except SingularMatrixError:
                continue
            if np.any(mu < -tol):
                continue
            x = v - Ai.T @ mu
            if np.all(A @ x <= b + tol):
                return x
    raise InfeasibleError("polyhedron is empty: no feasible KKT point for the projection")


def check_projection(cset, v, p, probes):
    """Largest value of ``<v - p, z - p>`` over probe points (``<= 0`` when optimal)."""
    d = np.asarray(v, dtype=float) - p
    return float(max(((np.asarray(z) - p) @ d for z in probes), default=0.0))
