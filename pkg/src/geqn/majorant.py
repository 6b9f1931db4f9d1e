"""Scalar majorant functions and the quantities they induce on ``[0, R)``.

A majorant ``psi`` controls the radial variation of ``lambda * f'`` around a
solution. Everything here is scalar: evaluation of ``psi`` and its first two
derivatives, the scalar Newton map ``n(t) = t - psi(t)/psi'(t)``, the
majorizing sequence ``t_{k+1} = |n(t_k)|`` and the radii ``nu``, ``rho``,
``sigma`` and ``r``.

Two closed forms are built in:

* Hoelder: ``psi(t) = K t^(p+1)/(p+1) - t`` on ``[0, inf)``; ``K`` already
  includes the strong-regularity modulus, so a Lipschitz constant ``L`` of
  ``f'`` corresponds to ``K = lambda * L`` with ``p = 1``.
* Smale: ``psi(t) = t/(1 - gamma t) - 2t`` on ``[0, 1/gamma)``.

Any other ``psi`` can be supplied as a callable returning
``(psi, dpsi, ddpsi)``; its radii are then found by bisection.

All functions accept ``fractions.Fraction`` arguments for the Smale form and
the Hoelder form with ``p = 1`` and then compute exactly.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import bisect

from .errors import DomainError, PreconditionError, RadiusUndetermined

BISECT_XTOL = 1e-12
GRID_POINTS = 512

_SQRT2 = math.sqrt(2.0)
_SQRT17 = math.sqrt(17.0)


@dataclass(frozen=True)
class MajorantSpec:
    """An immutable description of a majorant function.

    Use the :meth:`holder`, :meth:`smale` and :meth:`custom` constructors.

    Attributes
    ----------
    form : {"holder", "smale", "custom"}
    lam : float
        Strong-regularity modulus ``lambda`` the majorant is paired with.
    K, p : float
        Hoelder constants (``K`` absorbs ``lam``).
    gamma : float
        Smale constant.
    R : float
        Right end of the domain ``[0, R)``; ``math.inf`` allowed.
    evaluator : callable, optional
        ``t -> (psi, dpsi, ddpsi)`` for custom majorants.
    """

    form: str
    lam: float = 1.0
    K: Optional[float] = None
    p: Optional[float] = None
    gamma: Optional[float] = None
    R: float = math.inf
    evaluator: Optional[Callable] = field(default=None, compare=False)

    @classmethod
    def holder(cls, K, p=1, lam=1.0, R=math.inf):
        if not K > 0:
            raise ValueError(f"K must be positive, got {K}")
        if not 0 < p <= 1:
            raise ValueError(f"p must lie in (0, 1], got {p}")
        if p == 1:
            p = 1
        return cls("holder", lam=lam, K=K, p=p, R=R)

    @classmethod
    def smale(cls, gamma, lam=1.0):
        if gamma < 0:
            raise ValueError(f"gamma must be nonnegative, got {gamma}")
        R = math.inf if gamma == 0 else 1 / gamma
        return cls("smale", lam=lam, gamma=gamma, R=R)

    @classmethod
    def custom(cls, evaluator, R, lam=1.0):
        if not R > 0:
            raise ValueError(f"R must be positive, got {R}")
        return cls("custom", lam=lam, R=R, evaluator=evaluator)

    @property
    def rate_exponent(self):
        """Default ``p`` for the rate condition h3."""
        return self.p if self.form == "holder" else 1

    def describe(self):
        if self.form == "holder":
            return f"holder(K={self.K}, p={self.p}, lambda={self.lam})"
        if self.form == "smale":
            return f"smale(gamma={self.gamma}, lambda={self.lam})"
        return f"custom(R={self.R}, lambda={self.lam})"


@dataclass(frozen=True)
class RadiusReport:
    nu: float
    rho: float
    sigma: float
    r: float
    kappa: float

    def as_dict(self):
        return {"nu": self.nu, "rho": self.rho, "sigma": self.sigma, "r": self.r, "kappa": self.kappa}


@dataclass
class AxiomReport:
    """Grid verdicts for h1, h2, h3 and derivative consistency.

    ``violations`` maps an axiom name to the first offending grid point.
    """

    h1: bool
    h2: bool
    h3: bool
    smooth: bool
    p: float
    violations: dict

    @property
    def passed(self):
        return self.h1 and self.h2 and self.h3 and self.smooth


@dataclass
class RateEnvelope:
    ratios: list
    quadratic_bound: Optional[float]
    sequence: list


def _check_domain(spec, t):
    if not (0 <= t < spec.R):
        raise DomainError(f"t={t} outside [0, {spec.R})")


def eval_psi(spec, t):
    """Return ``(psi(t), psi'(t), psi''(t))``."""
    _check_domain(spec, t)
    if spec.form == "holder":
        K, p = spec.K, spec.p
        if p == 1:
            return K * t * t / 2 - t, K * t - 1, K
        tp = t**p
        ddpsi = K * p * t ** (p - 1) if t > 0 else math.inf
        return K * tp * t / (p + 1) - t, K * tp - 1, ddpsi
    if spec.form == "smale":
        g = spec.gamma
        s = 1 - g * t
        return t / s - 2 * t, 1 / (s * s) - 2, 2 * g / (s * s * s)
    return tuple(spec.evaluator(t))


def psi(spec, t):
    return eval_psi(spec, t)[0]


def dpsi(spec, t):
    return eval_psi(spec, t)[1]


def newton_map(spec, t):
    """Scalar Newton map ``t - psi(t)/psi'(t)``, defined while ``psi'(t) < 0``."""
    v, d, _ = eval_psi(spec, t)
    if not d < 0:
        raise DomainError(f"psi'({t}) = {d} >= 0: t is not below nu")
    return t - v / d


def e_psi(spec, t, u):
    """Linearization error ``psi(u) - psi(t) - psi'(t)(u - t)``."""
    vt, dt, _ = eval_psi(spec, t)
    vu = eval_psi(spec, u)[0]
    return vu - (vt + dt * (u - t))


# radii ---------------------------------------------------------------------


def _closed_radii(spec):
    if spec.form == "holder":
        K, p = float(spec.K), float(spec.p)
        nu = (1.0 / K) ** (1.0 / p)
        rho = ((p + 1.0) / ((2.0 * p + 1.0) * K)) ** (1.0 / p)
        zero = ((p + 1.0) / K) ** (1.0 / p)
        return nu, rho, zero
    g = float(spec.gamma)
    if g == 0:
        return math.inf, math.inf, math.inf
    return (_SQRT2 - 1.0) / (_SQRT2 * g), (5.0 - _SQRT17) / (4.0 * g), 1.0 / (2.0 * g)


def _root(name, fn, hi_limit):
    """Largest-interval root of ``fn`` starting from ``fn(0+) < 0``.

    ``fn`` is negative just above 0 (the defining set is nonempty). Returns
    ``hi_limit`` when ``fn`` stays negative up to a finite ``hi_limit``.
    """
    lo = 1e-12
    if not fn(lo) < 0:
        raise RadiusUndetermined(name, f"radius undetermined: {name} (defining set empty near 0)")
    if math.isfinite(hi_limit):
        hi = hi_limit - 1e-12
        if hi <= lo or fn(hi) < 0:
            return float(hi_limit)
    else:
        hi = 1.0
        while fn(hi) < 0:
            lo = hi
            hi *= 2.0
            if hi > 1e15:
                raise RadiusUndetermined(name)
    return float(bisect(fn, lo, hi, xtol=BISECT_XTOL, rtol=4 * np.finfo(float).eps, maxiter=500))


def _bisection_radii(spec, kappa):
    R = spec.R

    def safe(k):
        def g(t):
            try:
                return k(t)
            except (ZeroDivisionError, OverflowError, DomainError):
                return math.inf
        return g

    nu = _root("nu", safe(lambda t: dpsi(spec, t)), R)

    # rho: psi(t)/(t psi'(t)) - 1 < 1  <=>  2 t psi'(t) - psi(t) < 0 while psi' < 0
    def g_rho(t):
        v, d, _ = eval_psi(spec, t)
        return 2.0 * t * d - v

    rho = _root("rho", safe(g_rho), nu)
    sigma = _root("sigma", safe(lambda t: psi(spec, t)), min(kappa, R))
    return nu, rho, sigma


def radii(spec, kappa=math.inf, method="auto"):
    """Compute ``nu``, ``rho``, ``sigma`` and ``r = min(kappa, rho)``.

    Parameters
    ----------
    spec : MajorantSpec
    kappa : float
        Radius of the largest ball around the solution inside the domain.
    method : {"auto", "closed", "bisection"}
        ``"auto"`` uses closed forms for Hoelder/Smale and bisection otherwise.
        Bisection locates the boundary equalities ``psi' = 0``,
        ``psi = 2 t psi'`` and ``psi = 0`` to absolute tolerance 1e-12.
    """
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    if method == "auto":
        method = "bisection" if spec.form == "custom" else "closed"
    if method == "closed":
        if spec.form == "custom":
            raise ValueError("custom majorants have no closed-form radii")
        nu, rho, zero = _closed_radii(spec)
        sigma = min(kappa, zero)
    elif method == "bisection":
        nu, rho, sigma = _bisection_radii(spec, kappa)
    else:
        raise ValueError(f"unknown method {method!r}")
    return RadiusReport(nu=nu, rho=rho, sigma=sigma, r=min(kappa, rho), kappa=kappa)


# sequences -----------------------------------------------------------------


def iterate_sequence(spec, t0, k_max=50, tol=0.0):
    """The majorizing recurrence without the ``t0 < rho`` precondition.

    Stops after ``k_max`` steps, once a term drops below ``tol``, or when a
    term vanishes.
    """
    seq = [t0]
    t = t0
    for _ in range(k_max):
        if t == 0 or t < tol:
            break
        t = abs(newton_map(spec, t))
        if t == 0:
            break
        seq.append(t)
    return seq


def majorant_sequence(spec, t0, k_max=50, tol=1e-300):
    """Majorizing sequence ``t_{k+1} = |t_k - psi(t_k)/psi'(t_k)|``.

    Raises
    ------
    PreconditionError
        If ``t0`` is not in ``(0, rho)``.
    """
    rho = radii(spec).rho
    if not (0 < t0 < rho):
        raise PreconditionError(f"t0={t0} not in (0, rho={rho}); the sequence need not contract")
    return iterate_sequence(spec, t0, k_max=k_max, tol=tol)


def default_grid(spec, upper=None, points=GRID_POINTS):
    """Grid on ``(0, upper)``: log-spaced near 0, uniform further out."""
    if upper is None:
        try:
            upper = radii(spec).nu
        except RadiusUndetermined:
            upper = spec.R
        if not math.isfinite(upper):
            upper = 1.0
    half = points // 2
    near = np.geomspace(upper * 1e-3, upper / 2, half, endpoint=False)
    far = np.linspace(upper / 2, upper * (1 - 1e-3), points - half)
    return np.concatenate([near, far])


def _h3_values(spec, grid, p):
    out = []
    for t in grid:
        v, d, _ = eval_psi(spec, t)
        out.append((v / d - t) / t ** (p + 1))
    return np.asarray(out, dtype=float)


def _first_nonincreasing(values, grid):
    bad = np.flatnonzero(~(np.diff(values) > 0))
    return None if bad.size == 0 else float(grid[bad[0] + 1])


def verify_majorant_axioms(spec, grid=None, p=None):
    """Check h1, h2, h3 (for exponent ``p``) and derivative consistency.

    Never raises for a failing spec; failures are reported.
    """
    if p is None:
        p = spec.rate_exponent
    violations = {}

    v0, d0, _ = eval_psi(spec, 0.0)
    h1 = abs(v0) <= 1e-12 and abs(d0 + 1.0) <= 1e-12
    if not h1:
        violations["h1"] = 0.0

    if grid is None:
        grid = default_grid(spec)
    grid = np.asarray(grid, dtype=float)
    if grid.size < 16 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be sorted, strictly increasing and have at least 16 points")

    derivs = np.array([eval_psi(spec, t)[1] for t in grid])
    bad = _first_nonincreasing(derivs, grid)
    h2 = bad is None
    if not h2:
        violations["h2"] = bad

    pos = grid[grid > 0]
    h3 = False
    if h1 and h2 and np.all(derivs < 0):
        bad = _first_nonincreasing(_h3_values(spec, pos, p), pos)
        h3 = bad is None
        if not h3:
            violations["h3"] = bad
    else:
        violations.setdefault("h3", float(pos[0]) if pos.size else 0.0)

    smooth, where = _derivative_consistency(spec, pos)
    if not smooth:
        violations["smooth"] = where
    return AxiomReport(h1=h1, h2=h2, h3=h3, smooth=smooth, p=p, violations=violations)


def _derivative_consistency(spec, grid):
    """Central differences of psi and psi' must match psi' and psi''."""
    span = float(grid[-1])
    h = 1e-4 * span
    for t in grid[::8]:
        if t - h <= 0 or t + h >= spec.R:
            continue
        vm, dm, ddm = eval_psi(spec, t - h)
        v, d, dd = eval_psi(spec, t)
        vp, dp, ddp = eval_psi(spec, t + h)
        third = abs(ddp - ddm) / (2 * h)
        c = 10.0 * (1.0 + third + abs(dd))
        if abs(d - (vp - vm) / (2 * h)) > c * h * h + 1e-9 * (1 + abs(d)):
            return False, float(t)
        if abs(dd - (dp - dm) / (2 * h)) > c * h + 1e-7 * (1 + abs(dd)):
            return False, float(t)
    return True, None


def rate_envelope(spec, t0, p=None, k_max=50):
    """Ratios ``t_{k+1}/t_k^(p+1)`` and, for ``p = 1``, the bound ``psi''(t0)/(2|psi'(t0)|)``.

    Raises
    ------
    PreconditionError
        When h3 fails for ``p`` on the verification grid (the message names
        the offending ``t``) or ``t0`` is not in ``(0, rho)``.
    """
    if p is None:
        p = spec.rate_exponent
    grid = default_grid(spec)
    bad = _first_nonincreasing(_h3_values(spec, grid, p), grid)
    if bad is not None:
        raise PreconditionError(f"h3 fails for p={p}: not strictly increasing at t={bad}")
    seq = majorant_sequence(spec, t0, k_max=k_max)
    ratios = [b / a ** (p + 1) for a, b in zip(seq, seq[1:])]
    bound = None
    if p == 1:
        _, d, dd = eval_psi(spec, t0)
        bound = dd / (2 * abs(d))
    return RateEnvelope(ratios=ratios, quadratic_bound=bound, sequence=seq)
