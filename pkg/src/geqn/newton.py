"""Josephy-Newton iteration, traces and majorant-based certification."""

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.ndimage import minimum_filter
from scipy.optimize import minimize, minimize_scalar

from . import majorant
from .avi import linearize, solve_avi_detailed
from .checks import DEFAULT_SAMPLES, DEFAULT_SEED, check_majorant_inequality
from .errors import DomainError, GeqnError, PreconditionError, UnsupportedError
from .majorant import RadiusReport
from .problem import natural_residual

CONVERGED = "Converged"
MAX_ITER = "MaxIter"
SUBPROBLEM_FAILURE = "SubproblemFailure"
DIVERGED = "Diverged"

ROOT_TOL = 1e-6


class OrderUndetermined(GeqnError):
    """Too few or too flat errors to fit a convergence order."""


@dataclass(frozen=True)
class SolverConfig:
    tol_residual: float = 1e-10
    max_iter: int = 50
    divergence_radius: float = 1e3
    exact: bool = False

    def __post_init__(self):
        if not (self.tol_residual > 0 and self.max_iter > 0 and self.divergence_radius > 0):
            raise ValueError("solver tolerances and limits must be positive")


@dataclass
class IterationTrace:
    """Everything recorded along one run of :func:`solve`.

    ``errors`` and ``envelope`` are ``None`` when the solution, respectively
    a majorant, is unknown. ``ambiguous_steps`` lists the iterations whose
    subproblem had several solutions (the one nearest the iterate was kept).
    """

    iterates: list
    residuals: list
    status: str = MAX_ITER
    errors: Optional[list] = None
    envelope: Optional[list] = None
    ambiguous_steps: list = field(default_factory=list)
    message: str = ""

    @property
    def iterations(self):
        return len(self.iterates) - 1

    @property
    def x(self):
        return self.iterates[-1]

    @property
    def ratios(self):
        """``e_{k+1} / e_k`` (``nan`` where ``e_k = 0``)."""
        if self.errors is None:
            return None
        return [b / a if a > 0 else math.nan for a, b in zip(self.errors, self.errors[1:])]

    def write_csv(self, stream):
        """One row per iterate: ``k, x, residual, error, t_k, ratio``."""
        w = csv.writer(stream, lineterminator="\n")
        w.writerow(["k", "x", "residual", "error", "t_k", "ratio"])
        ratios = self.ratios
        for k, x in enumerate(self.iterates):
            row = [k, ";".join(_fmt(v) for v in np.atleast_1d(x)), _fmt(self.residuals[k])]
            row.append(_fmt(self.errors[k]) if self.errors is not None else "")
            env = self.envelope
            row.append(_fmt(env[k]) if env is not None and k < len(env) else "")
            row.append(_fmt(ratios[k - 1]) if ratios is not None and k > 0 else "")
            w.writerow(row)

    def to_csv(self):
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def _fmt(v):
    return format(float(v), ".17g")


def _norm(v):
    v = np.atleast_1d(v)
    if v.dtype == object:
        if v.size == 1:
            return abs(v[0])
        return math.sqrt(float(sum(e * e for e in v)))
    return float(np.linalg.norm(v))


def _start(x0, exact):
    if exact:
        return np.array([Fraction(v) for v in np.atleast_1d(x0)], dtype=object)
    return np.atleast_1d(np.asarray(x0, dtype=float)).copy()


def solve(problem, x0, config=None, spec=None):
    """Run ``x_{k+1} = solve_avi(linearize(problem, x_k), hint=x_k)``.

    Terminates when the natural residual is at most ``tol_residual``, after
    ``max_iter`` steps, on a subproblem failure, or when an iterate leaves
    the ball of radius ``divergence_radius * (1 + ||x0||)`` around ``x0``.
    Failures are reported through ``status``; only malformed input raises.

    With ``config.exact`` the iterates are ``Fraction`` arrays (zero-map
    problems whose evaluators support exact arithmetic).
    """
    config = config or SolverConfig()
    x = _start(x0, config.exact)
    if x.shape != (problem.n,):
        raise ValueError(f"x0 has shape {x.shape}, expected ({problem.n},)")
    x0v = x.copy()
    limit = config.divergence_radius * (1.0 + float(_norm(x0v)))
    trace = IterationTrace(iterates=[x], residuals=[natural_residual(problem, x)])

    while True:
        if trace.residuals[-1] <= config.tol_residual:
            trace.status = CONVERGED
            break
        if trace.iterations >= config.max_iter:
            trace.status = MAX_ITER
            break
        try:
            step = solve_avi_detailed(linearize(problem, x), hint=x)
            x_new = step.z
            res = natural_residual(problem, x_new)
        except (GeqnError, ArithmeticError, ValueError) as exc:
            trace.status = SUBPROBLEM_FAILURE
            trace.message = f"iteration {trace.iterations}: {exc}"
            break
        if step.ambiguous:
            trace.ambiguous_steps.append(trace.iterations)
        x = x_new
        trace.iterates.append(x)
        trace.residuals.append(res)
        if float(_norm(x - x0v)) > limit:
            trace.status = DIVERGED
            trace.message = f"iterate left the ball of radius {limit:.3g} around x0"
            break

    if problem.solution is not None:
        xbar = problem.solution
        if config.exact:
            xbar = _start(xbar, True)
        trace.errors = [_norm(xk - xbar) for xk in trace.iterates]
    if spec is not None and trace.errors is not None:
        try:
            trace.envelope = majorant.iterate_sequence(spec, trace.errors[0], k_max=trace.iterations)
        except DomainError:
            trace.envelope = None
    return trace


def estimate_order(trace, floor=1e-14):
    """Least-squares slope of ``log e_{k+1}`` against ``log e_k``.

    Uses errors above ``floor``; needs at least four of them spanning four
    orders of magnitude. Accepts a trace or a plain error sequence.
    """
    errors = trace.errors if isinstance(trace, IterationTrace) else trace
    if errors is None:
        raise OrderUndetermined("order undetermined: no error data (solution unknown)")
    e = np.array([float(v) for v in errors])
    e = e[: np.argmax(~(e > floor))] if np.any(~(e > floor)) else e
    if e.size < 4 or math.log10(e.max() / e.min()) < 4:
        raise OrderUndetermined(f"order undetermined: {e.size} usable errors")
    le = np.log(e)
    slope, _ = np.polyfit(le[:-1], le[1:], 1)
    return float(slope)


@dataclass
class Certificate:
    """Verdicts comparing one Newton run with the majorant theory."""

    spec: majorant.MajorantSpec
    radii: RadiusReport
    t0: float
    trace: IterationTrace
    verdicts: dict
    notes: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(self.verdicts.values())

    def lines(self):
        r = self.radii
        out = [
            f"spec: {self.spec.describe()}",
            f"radii: nu={r.nu:.6g} rho={r.rho:.6g} sigma={r.sigma:.6g} r={r.r:.6g} kappa={r.kappa:.6g}",
            f"t0 = {float(self.t0):.6g}; status = {self.trace.status} after {self.trace.iterations} iterations",
        ]
        for name, ok in self.verdicts.items():
            note = self.notes.get(name, "")
            out.append(f"  [{'pass' if ok else 'FAIL'}] {name}" + (f": {note}" if note else ""))
        out.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return out


def _check_radius(problem, spec, rad):
    radius = min(problem.kappa, spec.R)
    if math.isfinite(radius):
        return radius
    return max(v for v in (rad.sigma, rad.nu, rad.rho) if math.isfinite(v))


def certify(problem, spec, x0, config=None, samples=DEFAULT_SAMPLES, seed=DEFAULT_SEED, scan_points=None):
    """Certify one run from ``x0`` against ``spec``.

    Checks ``x0`` in ``B(xbar, r)``, the majorant axioms, a sampled majorant
    inequality, ``||x_k - xbar|| <= t_k``, the rate bound with exponent
    ``p + 1``, the quadratic bound ``psi''(t0)/(2|psi'(t0)|)`` when ``p = 1``,
    convergence, and a uniqueness scan on ``B(xbar, min(r, sigma))``.

    Raises
    ------
    PreconditionError
        Missing solution or failing majorant axioms.
    """
    xbar = problem.require_solution()
    axioms = majorant.verify_majorant_axioms(spec)
    if not axioms.passed:
        raise PreconditionError(f"majorant axioms fail: {axioms.violations}")
    config = config or SolverConfig()
    rad = majorant.radii(spec, kappa=problem.kappa)
    t0 = float(np.linalg.norm(np.asarray(np.atleast_1d(x0), dtype=float) - xbar))
    p = spec.rate_exponent
    verdicts, notes = {}, {}

    verdicts["x0 in B(xbar, r)"] = t0 < rad.r
    notes["x0 in B(xbar, r)"] = f"t0={t0:.6g} vs r={rad.r:.6g}"
    verdicts["majorant axioms"] = True
    ineq = check_majorant_inequality(problem, spec, samples=samples, seed=seed, radius=_check_radius(problem, spec, rad))
    verdicts["majorant inequality"] = ineq.passed
    notes["majorant inequality"] = f"max violation {ineq.max_violation:.3e} over {ineq.samples} samples"

    trace = solve(problem, x0, config, spec=spec)
    verdicts["converged"] = trace.status == CONVERGED
    notes["converged"] = trace.status if not trace.message else f"{trace.status} ({trace.message})"

    slack = 1e-10 * (1.0 + t0)
    env = trace.envelope
    e = [float(v) for v in trace.errors]
    if env is None or len(env) < len(e) and any(v > 0 for v in e[len(env):]):
        verdicts["majorization e_k <= t_k"] = False
        notes["majorization e_k <= t_k"] = "majorizing sequence undefined from t0"
    else:
        env = [float(v) for v in env] + [0.0] * (len(e) - len(env))
        bad = [k for k in range(len(e)) if e[k] > env[k] + slack]
        verdicts["majorization e_k <= t_k"] = not bad
        notes["majorization e_k <= t_k"] = f"first violation at k={bad[0]}" if bad else f"{len(e)} iterates"

        bad = []
        for k in range(len(e) - 1):
            if env[k] > 0 and env[k + 1] > 0:
                bound = env[k + 1] / env[k] ** (p + 1) * e[k] ** (p + 1)
                if e[k + 1] > bound + slack:
                    bad.append(k)
        verdicts[f"rate exponent {p + 1}"] = not bad
        if bad:
            notes[f"rate exponent {p + 1}"] = f"first violation at k={bad[0]}"

        if p == 1 and 0 < t0 < rad.rho:
            _, d, dd = majorant.eval_psi(spec, t0)
            qb = dd / (2 * abs(d))
            bad = [k for k in range(len(e) - 1) if e[k + 1] > qb * e[k] ** 2 + slack]
            verdicts["quadratic bound"] = not bad
            notes["quadratic bound"] = f"e_(k+1)/e_k^2 <= {qb:.6g}"

    if problem.n <= 3:
        radius = min(rad.r, rad.sigma)
        per_dim = scan_points or {1: 2001, 2: 101, 3: 25}[problem.n]
        scan = uniqueness_scan(problem, radius, per_dim)
        verdicts["uniqueness scan"] = scan.passed
        notes["uniqueness scan"] = scan.summary()
    return Certificate(spec=spec, radii=rad, t0=t0, trace=trace, verdicts=verdicts, notes=notes)


@dataclass
class UniquenessReport:
    radius: float
    points: int
    spacing: float
    roots: list
    passed: bool

    def summary(self):
        if self.passed:
            return f"no second solution among {self.points} points within radius {self.radius:.6g}"
        return f"{len(self.roots)} second solution(s), first at {np.round(self.roots[0], 10)}"


def uniqueness_scan(problem, radius, grid_per_dim, spec=None):
    """Search ``B(xbar, radius)`` for solutions other than ``xbar``.

    The natural residual is evaluated on a grid; grid local minima are
    refined by local minimization. Any point with residual below 1e-6 more
    than ten grid spacings from ``xbar`` is reported.

    Raises
    ------
    UnsupportedError
        For ``n > 3``.
    PreconditionError
        If ``spec`` is given and ``radius`` exceeds ``min(r, sigma)``.
    """
    xbar = problem.require_solution()
    n = problem.n
    if n > 3:
        raise UnsupportedError(f"uniqueness scan supports n <= 3, got {n}")
    if spec is not None:
        rad = majorant.radii(spec, kappa=problem.kappa)
        if radius > min(rad.r, rad.sigma) * (1 + 1e-12):
            raise PreconditionError(f"radius {radius} exceeds min(r, sigma) = {min(rad.r, rad.sigma)}")
    if not radius > 0:
        return UniquenessReport(radius, 0, 0.0, [], True)

    axis = np.linspace(-radius, radius, grid_per_dim)
    spacing = axis[1] - axis[0] if grid_per_dim > 1 else 2 * radius
    mesh = np.meshgrid(*([axis] * n), indexing="ij")
    offsets = np.stack([m.ravel() for m in mesh], axis=1)
    inside = np.linalg.norm(offsets, axis=1) <= radius
    values = np.full(offsets.shape[0], np.inf)
    for i in np.flatnonzero(inside):
        values[i] = natural_residual(problem, xbar + offsets[i])

    def res(z):
        z = np.atleast_1d(z)
        if np.linalg.norm(z - xbar) > radius:
            return np.inf
        return natural_residual(problem, z)

    far = 10 * spacing
    grid_vals = values.reshape(mesh[0].shape)
    is_min = (grid_vals == minimum_filter(grid_vals, size=3, mode="constant", cval=np.inf)) & np.isfinite(grid_vals)
    roots = []
    for i in np.flatnonzero(inside):
        if values[i] < ROOT_TOL and np.linalg.norm(offsets[i]) > far:
            roots.append(xbar + offsets[i])
    for i in np.flatnonzero(is_min.ravel()):
        if np.linalg.norm(offsets[i]) <= far:
            continue
        z0 = xbar + offsets[i]
        if n == 1:
            r = minimize_scalar(lambda t: res(np.array([t])), bounds=(max(z0[0] - spacing, xbar[0] - radius), min(z0[0] + spacing, xbar[0] + radius)), method="bounded", options={"xatol": 1e-14})
            z, val = np.array([r.x]), float(r.fun)
        else:
            r = minimize(res, z0, method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-16, "initial_simplex": z0 + spacing * np.vstack([np.zeros(n), np.eye(n)])})
            z, val = r.x, float(r.fun)
        if val < ROOT_TOL and np.linalg.norm(z - xbar) > far:
            roots.append(z)
    roots = _cluster(roots, far)
    return UniquenessReport(radius, int(inside.sum()), float(spacing), roots, not roots)


def _cluster(points, tol):
    out = []
    for p in points:
        if not any(np.linalg.norm(p - o) <= tol for o in out):
            out.append(np.asarray(p))
    return out
