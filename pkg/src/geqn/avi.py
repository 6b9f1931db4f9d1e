"""Newton subproblems as affine variational inequalities.

One Josephy-Newton step solves ``q + M z + N_C(z) ∋ 0`` with
``M = f'(x)`` and ``q = f(x) - f'(x) x``. For the orthant this is the LCP
``0 <= z ⊥ M z + q >= 0``.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import nnls

from . import kernels, linalg
from .errors import (
    NoLocalizedSolution,
    NotStronglyRegular,
    PreconditionError,
    SingularMatrixError,
    SubproblemError,
    UnsupportedError,
)
from .sets import SetDescriptor, project

ENUM_MAX = 12
BOX_ENUM_MAX = 8
SOLVE_ENUM_MAX = 8
TOL = 1e-10
DEGENERACY_TOL = 1e-8


@dataclass
class AVI:
    """The inclusion ``q + M z + N_C(z) ∋ 0`` (``N_C = {0}`` for the zero set)."""

    M: np.ndarray
    q: np.ndarray
    cset: SetDescriptor

    def __post_init__(self):
        n = self.q.shape[0]
        if self.M.shape != (n, n) or self.cset.n != n:
            raise ValueError(f"inconsistent AVI dimensions: M{self.M.shape}, q{self.q.shape}, set n={self.cset.n}")

    def residual(self, z):
        """Natural residual of the AVI at ``z``."""
        w = np.asarray(self.M @ z + self.q, dtype=float)
        if self.cset.kind == "zero":
            return float(np.linalg.norm(w))
        z = np.asarray(z, dtype=float)
        return float(np.linalg.norm(z - project(self.cset, z - w)))


@dataclass
class LcpResult:
    status: str  # "solved" | "ray" | "cycle"
    z: np.ndarray
    pivots: int

    @property
    def solved(self):
        return self.status == "solved"


@dataclass
class AviSolution:
    z: np.ndarray
    method: str
    candidates: list = field(default_factory=list)

    @property
    def ambiguous(self):
        return len(self.candidates) > 1


def linearize(problem, x):
    """Partial linearization of ``f + F`` at ``x`` as an :class:`AVI`."""
    x = np.asarray(x)
    M = np.asarray(problem.jac(x))
    q = np.asarray(problem.f(x)) - M @ x
    return AVI(M, q, problem.cset)


_STATUS = {kernels.LCP_SOLVED: "solved", kernels.LCP_RAY: "ray", kernels.LCP_CYCLE: "cycle"}


def lemke(M, q, max_pivots=None):
    """Lemke's method with covering vector ``e`` and lexicographic ratio test.

    The pivot cap defaults to ``10 * 2**n``.
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    q = np.atleast_1d(np.asarray(q, dtype=float))
    n = q.size
    if M.shape != (n, n):
        raise ValueError(f"M must be {n}x{n}, got {M.shape}")
    if max_pivots is None:
        max_pivots = 10 * 2 ** min(n, 40)
    if max_pivots < 1:
        raise ValueError("max_pivots must be >= 1")
    status, z, pivots = kernels.lemke(M, q, int(max_pivots))
    return LcpResult(_STATUS[status], np.asarray(z, dtype=float), int(pivots))


def _dedupe(points, tol=1e-9):
    out = []
    for p in points:
        if not any(np.linalg.norm(p - o) <= tol * (1 + np.linalg.norm(o)) for o in out):
            out.append(p)
    return out


def lcp_enumerate(M, q, diagnostics=None):
    """All LCP solutions by enumerating the ``2**n`` complementary index sets.

    Singular principal blocks are skipped and, when ``diagnostics`` is a
    list, recorded there as ``("singular", alpha)``.
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    q = np.atleast_1d(np.asarray(q, dtype=float))
    n = q.size
    if n > ENUM_MAX:
        raise ValueError(f"enumeration supports n <= {ENUM_MAX}, got {n}")
    sols = []
    for size in range(n + 1):
        for alpha in itertools.combinations(range(n), size):
            a = list(alpha)
            z = np.zeros(n)
            if a:
                try:
                    z[a] = linalg.solve(M[np.ix_(a, a)], -q[a])
                except SingularMatrixError:
                    if diagnostics is not None:
                        diagnostics.append(("singular", alpha))
                    continue
            w = M @ z + q
            rest = [i for i in range(n) if i not in alpha]
            if np.all(z[a] >= -TOL) and np.all(w[rest] >= -TOL):
                sols.append(np.maximum(z, 0.0))
    return _dedupe(sols)


def box_face_enumerate(avi, diagnostics=None):
    """All solutions of a box-constrained AVI by enumerating its ``3**n`` faces."""
    cset = avi.cset
    if cset.kind != "box":
        raise ValueError("box_face_enumerate needs a box set")
    M = np.asarray(avi.M, dtype=float)
    q = np.asarray(avi.q, dtype=float)
    n = q.size
    if n > BOX_ENUM_MAX:
        raise ValueError(f"face enumeration supports n <= {BOX_ENUM_MAX}, got {n}")
    lo, up = cset.lower, cset.upper
    options = []
    for i in range(n):
        opts = ["free"]
        if math.isfinite(lo[i]):
            opts.append("lower")
        if math.isfinite(up[i]):
            opts.append("upper")
        options.append(opts)
    sols = []
    for face in itertools.product(*options):
        z = np.zeros(n)
        free = [i for i, s in enumerate(face) if s == "free"]
        fixed = [i for i, s in enumerate(face) if s != "free"]
        for i in fixed:
            z[i] = lo[i] if face[i] == "lower" else up[i]
        if free:
            rhs = -q[free] - M[np.ix_(free, fixed)] @ z[fixed]
            try:
                z[free] = linalg.solve(M[np.ix_(free, free)], rhs)
            except SingularMatrixError:
                if diagnostics is not None:
                    diagnostics.append(("singular", face))
                continue
        if np.any(z < lo - TOL) or np.any(z > up + TOL):
            continue
        w = M @ z + q
        if all(w[i] >= -TOL for i in fixed if face[i] == "lower") and all(
            w[i] <= TOL for i in fixed if face[i] == "upper"
        ):
            sols.append(np.clip(z, lo, up))
    return _dedupe(sols)


def polyhedron_to_lcp(avi):
    """Reduce a polyhedral AVI to the LCP in the multipliers ``mu``.

    Returns ``(M', q', recover)`` with ``M' = A M^-1 A^T``,
    ``q' = b + A M^-1 q`` and ``recover(mu) = -M^-1 (q + A^T mu)``.

    Raises
    ------
    SingularMatrixError
        When ``M`` is singular; callers fall back to enumeration.
    """
    A, b = avi.cset.as_inequalities()
    M = np.asarray(avi.M, dtype=float)
    q = np.asarray(avi.q, dtype=float)
    Minv_q = linalg.solve(M, q)
    Minv_At = np.column_stack([linalg.solve(M, a) for a in A]) if A.size else np.zeros((M.shape[0], 0))
    Mp = A @ Minv_At
    qp = b + A @ Minv_q

    def recover(mu):
        return -(Minv_q + Minv_At @ np.asarray(mu, dtype=float))

    return Mp, qp, recover


def polyhedron_enumerate(avi, diagnostics=None):
    """All solutions of a polyhedral AVI by enumerating active constraint sets."""
    A, b = avi.cset.as_inequalities()
    M = np.asarray(avi.M, dtype=float)
    q = np.asarray(avi.q, dtype=float)
    m, n = A.shape
    if m > ENUM_MAX:
        raise ValueError(f"active-set enumeration supports m <= {ENUM_MAX}, got {m}")
    sols = []
    for size in range(min(m, n) + 1):
        for active in itertools.combinations(range(m), size):
            Ai = A[list(active)]
            K = np.block([[M, Ai.T], [Ai, np.zeros((size, size))]])
            rhs = np.concatenate([-q, b[list(active)]])
            try:
                sol = linalg.solve(K, rhs)
            except SingularMatrixError:
                if diagnostics is not None:
                    diagnostics.append(("singular", active))
                continue
            z, mu = sol[:n], sol[n:]
            if np.all(mu >= -TOL) and np.all(A @ z <= b + TOL * (1 + np.abs(b))):
                sols.append(z)
    return _dedupe(sols)


def _nearest(cands, hint):
    hint = np.asarray(hint, dtype=float)
    return min(cands, key=lambda z: (round(float(np.linalg.norm(np.asarray(z, float) - hint)), 12), tuple(np.asarray(z, float))))


def _candidates(avi):
    kind = avi.cset.kind
    n = avi.q.shape[0]
    if kind == "orthant":
        res = lemke(avi.M, avi.q)
        if n <= SOLVE_ENUM_MAX:
            cands = lcp_enumerate(avi.M, avi.q)
            return cands, "lemke+enumeration" if res.solved else "enumeration"
        if res.solved:
            return [res.z], "lemke"
        if n <= ENUM_MAX:
            return lcp_enumerate(avi.M, avi.q), "enumeration"
        raise SubproblemError(f"Lemke {res.status} termination and n={n} exceeds the enumeration limit")
    if kind == "box":
        if n > BOX_ENUM_MAX:
            raise UnsupportedError(f"box subproblems support n <= {BOX_ENUM_MAX}")
        return box_face_enumerate(avi), "faces"
    if kind == "polyhedron":
        A, _ = avi.cset.as_inequalities()
        z = None
        try:
            Mp, qp, recover = polyhedron_to_lcp(avi)
            res = lemke(Mp, qp)
            if res.solved:
                z = recover(res.z)
        except SingularMatrixError:
            pass
        if A.shape[0] <= ENUM_MAX:
            return polyhedron_enumerate(avi), "kkt-lemke+active-sets" if z is not None else "active-sets"
        if z is None:
            raise SubproblemError("multiplier LCP unsolved and too many constraints to enumerate")
        return [z], "kkt-lemke"
    raise ValueError(f"unknown set kind {kind!r}")


def solve_avi_detailed(avi, hint, localization=None):
    """Solve the AVI; return the solution nearest ``hint`` with all candidates.

    Parameters
    ----------
    localization : (center, radius), optional
        Only solutions in this closed ball are accepted.
    """
    if avi.cset.kind == "zero":
        z = linalg.solve(avi.M, -avi.q)
        cands, method = [z], "lu"
    else:
        cands, method = _candidates(avi)
    if localization is not None:
        center, radius = localization
        center = np.asarray(center, dtype=float)
        cands = [z for z in cands if np.linalg.norm(np.asarray(z, float) - center) <= radius]
        if not cands:
            raise NoLocalizedSolution(f"no localized solution within {radius} of {center}")
    if not cands:
        raise SubproblemError("subproblem has no solution")
    z = cands[0] if len(cands) == 1 else _nearest(cands, hint)
    return AviSolution(z=z, method=method, candidates=cands)


def solve_avi(avi, hint, localization=None):
    """Solution of the AVI nearest ``hint`` (ties broken lexicographically)."""
    return solve_avi_detailed(avi, hint, localization).z


def strong_regularity_modulus(avi, xstar, degeneracy_tol=DEGENERACY_TOL):
    """Lipschitz modulus of the localized inverse of the AVI at ``xstar``.

    For the zero set this is ``||M^-1||``. For polyhedral sets the active
    constraints are split into strongly active (positive multiplier) and
    degenerate ones; every piece ``strong ∪ S`` with ``S`` a subset of the
    degenerate constraints gives the reduced matrix ``Z^T M Z`` on the null
    space of the active rows. All pieces must be nonsingular with a common
    determinant sign; the modulus is the largest ``||(Z^T M Z)^-1||``.

    Raises
    ------
    SingularMatrixError
        Zero set with singular ``M``.
    NotStronglyRegular
        A piece is singular or the piece orientations disagree.
    PreconditionError
        ``xstar`` does not solve the AVI within 1e-8.
    """
    M = np.asarray(avi.M, dtype=float)
    q = np.asarray(avi.q, dtype=float)
    xstar = np.asarray(xstar, dtype=float)
    if avi.cset.kind == "zero":
        return linalg.inverse_norm(M)
    if avi.residual(xstar) > 1e-8:
        raise PreconditionError(f"xstar is not a solution of the AVI (residual {avi.residual(xstar):.2e})")
    A, b = avi.cset.as_inequalities()
    slack = b - A @ xstar
    active = np.flatnonzero(slack <= degeneracy_tol)
    w = M @ xstar + q
    if active.size:
        mu, _ = nnls(-A[active].T, w)
    else:
        mu = np.zeros(0)
    strong = [int(i) for i, m in zip(active, mu) if m > degeneracy_tol]
    degenerate = [int(i) for i, m in zip(active, mu) if m <= degeneracy_tol]

    n = M.shape[0]
    sign = None
    worst = 0.0
    for size in range(len(degenerate) + 1):
        for extra in itertools.combinations(degenerate, size):
            rows = strong + list(extra)
            Z = null_space(A[rows]) if rows else np.eye(n)
            if Z.shape[1] == 0:
                det, norm = 1.0, 0.0
            else:
                H = Z.T @ M @ Z
                try:
                    norm = linalg.inverse_norm(H)
                except SingularMatrixError:
                    raise NotStronglyRegular(f"not strongly regular: piece singular (active rows {rows})") from None
                det = np.linalg.det(H)
            s = 1 if det > 0 else -1
            if sign is None:
                sign = s
            elif s != sign:
                raise NotStronglyRegular(f"not strongly regular: piece orientation flips (active rows {rows})")
            worst = max(worst, norm)
    return worst
