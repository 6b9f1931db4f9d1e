"""Command-line front end.

Subcommands: ``radii``, ``sequence``, ``solve``, ``certify``, ``lcp``,
``bench``, ``extremal``. Reports and CSV go to stdout (or ``--output``),
diagnostics to stderr. Exit codes: 0 success, 1 failed certificate or
non-convergence, 2 usage or parse errors.

Negative starting points must be attached to the flag, e.g. ``--x0=-1,2``.
"""

import argparse
import csv
import io
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

from . import __version__, majorant, newton
from .avi import lcp_enumerate, lemke, linearize
from .checks import DEFAULT_SAMPLES, DEFAULT_SEED, extremal_problem
from .errors import GeqnError, PreconditionError, ProblemFormatError
from .majorant import MajorantSpec
from .registry import CERTIFIED, load_problem

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _fmt(v):
    return format(float(v), ".17g")


def _numbers(text):
    """Comma-separated entries, kept exact: ``0.5``, ``-1e-3`` and ``2/3`` all parse."""
    try:
        return [Fraction(v.strip()) for v in text.split(",") if v.strip()]
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _integral(v):
    return int(v) if v == int(v) else v


def _pairs(items, allowed, flag):
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or key not in allowed:
            raise UsageError(f"{flag}: expected {' '.join(k + '=..' for k in allowed)}, got {item!r}")
        try:
            out[key] = float(value)
        except ValueError:
            raise UsageError(f"{flag}: {key} must be a number, got {value!r}") from None
    return out


def spec_from_args(args, required=True):
    """Build the majorant from ``--holder``/``--smale`` and ``--lambda``."""
    lam = args.lam
    if args.holder is not None:
        kv = _pairs(args.holder, ("K", "p", "R"), "--holder")
        if "K" not in kv:
            raise UsageError("--holder needs K=..")
        p = _integral(kv.get("p", 1.0))
        return MajorantSpec.holder(_integral(kv["K"]), p, lam=lam, R=kv.get("R", math.inf))
    if args.smale is not None:
        kv = _pairs(args.smale, ("gamma",), "--smale")
        if "gamma" not in kv:
            raise UsageError("--smale needs gamma=..")
        return MajorantSpec.smale(kv["gamma"], lam=lam)
    if required:
        raise UsageError("a majorant is required: pass --holder K=.. [p=..] or --smale gamma=..")
    return None


# output ----------------------------------------------------------------------


def _write_rows(out, header, rows):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)


def _trace_text(trace, out):
    print(f"status: {trace.status} after {trace.iterations} iterations", file=out)
    if trace.message:
        print(f"message: {trace.message}", file=out)
    for k, x in enumerate(trace.iterates):
        xs = ", ".join(f"{float(v):.12g}" for v in np.atleast_1d(x))
        line = f"k={k:3d}  x=({xs})  residual={float(trace.residuals[k]):.3e}"
        if trace.errors is not None:
            line += f"  error={float(trace.errors[k]):.3e}"
        if trace.envelope is not None and k < len(trace.envelope):
            line += f"  t_k={float(trace.envelope[k]):.3e}"
        print(line, file=out)
    if trace.ambiguous_steps:
        print(f"ambiguous subproblems at steps {trace.ambiguous_steps}", file=out)


# subcommands -----------------------------------------------------------------


def cmd_radii(args, out):
    spec = spec_from_args(args)
    rep = majorant.radii(spec, kappa=args.kappa, method=args.method)
    if args.format == "csv":
        _write_rows(out, ["name", "value"], [(k, _fmt(v)) for k, v in rep.as_dict().items()])
    else:
        print(f"nu={rep.nu:.6g} rho={rep.rho:.6g} sigma={rep.sigma:.6g} r={rep.r:.6g}", file=out)
    return EXIT_OK


def cmd_sequence(args, out):
    spec = spec_from_args(args)
    seq = majorant.majorant_sequence(spec, args.t0, k_max=args.k_max)
    ratios = [""] + [_fmt(b / a) for a, b in zip(seq, seq[1:])]
    if args.format == "csv":
        _write_rows(out, ["k", "t_k", "ratio"], [(k, _fmt(t), r) for k, (t, r) in enumerate(zip(seq, ratios))])
    else:
        for k, t in enumerate(seq):
            print(f"t_{k} = {t:.17g}", file=out)
    return EXIT_OK


def _config(args):
    return newton.SolverConfig(tol_residual=args.tol, max_iter=args.max_iter, exact=args.exact)


def cmd_solve(args, out):
    problem = load_problem(args.problem)
    spec = spec_from_args(args, required=False)
    trace = newton.solve(problem, _x0(args, problem), _config(args), spec=spec)
    if args.format == "csv":
        trace.write_csv(out)
    else:
        _trace_text(trace, out)
    if trace.status != newton.CONVERGED:
        print(f"geqn: no convergence: {trace.status} {trace.message}".rstrip(), file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_certify(args, out):
    problem = load_problem(args.problem)
    spec = spec_from_args(args)
    try:
        cert = newton.certify(problem, spec, _x0(args, problem), _config(args), samples=args.samples, seed=args.seed)
    except PreconditionError as exc:
        print(f"geqn: cannot certify: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.format == "csv":
        _write_rows(out, ["check", "passed", "note"], [(k, int(v), cert.notes.get(k, "")) for k, v in cert.verdicts.items()])
    else:
        print("\n".join(cert.lines()), file=out)
    return EXIT_OK if cert.passed else EXIT_FAIL


def cmd_lcp(args, out):
    problem = load_problem(args.problem)
    if problem.cset.kind != "orthant" or problem.poly is None or problem.poly.degree > 1:
        raise UsageError("lcp needs an affine problem on the nonnegative orthant")
    avi = linearize(problem, np.zeros(problem.n))
    if args.method == "enumerate":
        sols = lcp_enumerate(avi.M, avi.q)
        status, z, pivots = ("solved", sols[0], 0) if sols else ("infeasible", None, 0)
    else:
        res = lemke(avi.M, avi.q)
        status, z, pivots = res.status, res.z, res.pivots
    if args.format == "csv":
        zs = ";".join(_fmt(v) for v in z) if z is not None else ""
        _write_rows(out, ["status", "pivots", "z"], [(status, pivots, zs)])
    else:
        print(f"status: {status} ({pivots} pivots)", file=out)
        if z is not None:
            print("z = (" + ", ".join(f"{v:.12g}" for v in z) + ")", file=out)
    return EXIT_OK if status == "solved" else EXIT_FAIL


def _bench_one(item):
    pair, samples, seed = item
    problem = load_problem(pair.problem)
    cert = newton.certify(problem, pair.spec, pair.x0, samples=samples, seed=seed)
    err = cert.trace.errors[-1] if cert.trace.errors else math.nan
    return (
        pair.key,
        pair.problem,
        pair.spec.describe(),
        ";".join(_fmt(v) for v in pair.x0),
        cert.trace.status,
        cert.trace.iterations,
        _fmt(err),
        "pass" if cert.passed else "fail",
    )


def cmd_bench(args, out):
    items = [(pair, args.samples, args.seed) for pair in CERTIFIED]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_bench_one, items))
    else:
        rows = [_bench_one(item) for item in items]
    rows.sort(key=lambda r: r[0])
    header = ["pair", "problem", "spec", "x0", "status", "iterations", "final_error", "verdict"]
    if args.format == "csv":
        _write_rows(out, header, rows)
    else:
        for r in rows:
            print(f"{r[7]:4s}  {r[0]:40s}  {r[4]} in {r[5]} its, error {float(r[6]):.2e}", file=out)
    failed = [r[0] for r in rows if r[7] != "pass"]
    if failed:
        print(f"geqn: {len(failed)} pair(s) failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_extremal(args, out):
    """Run Newton on ``sign(x) psi(|x|)`` and compare ``|x_k|`` with ``t_k``."""
    spec = spec_from_args(args)
    problem = extremal_problem(spec)
    rad = majorant.radii(spec)
    if args.x0 is None:
        x0 = [rad.rho - 1e-6]
    elif len(args.x0) != 1:
        raise UsageError("extremal problems are scalar: pass a single --x0")
    else:
        x0 = args.x0 if args.exact else [float(args.x0[0])]
    trace = newton.solve(problem, x0, _config(args), spec=spec)
    env = trace.envelope or []
    gaps = [abs(float(e) - float(t)) for e, t in zip(trace.errors, env)]
    worst = max(gaps) if gaps else math.nan
    if args.format == "csv":
        trace.write_csv(out)
    else:
        print(f"rho = {rad.rho:.17g}", file=out)
        _trace_text(trace, out)
        print(f"max | |x_k| - t_k | = {worst:.3e} over {len(gaps)} iterates", file=out)
    ok = len(gaps) == len(trace.errors) and worst <= args.match_tol
    if not ok:
        print(f"geqn: |x_k| departs from t_k by {worst:.3e}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


def _x0(args, problem):
    if args.x0 is None:
        raise UsageError("--x0 is required")
    if len(args.x0) != problem.n:
        raise UsageError(f"--x0 has {len(args.x0)} entries, problem dimension is {problem.n}")
    return args.x0 if args.exact else [float(v) for v in args.x0]


# parser ----------------------------------------------------------------------


def build_parser():
    spec = argparse.ArgumentParser(add_help=False)
    g = spec.add_argument_group("majorant")
    ex = g.add_mutually_exclusive_group()
    ex.add_argument("--holder", nargs="+", metavar="KEY=VALUE", help="Hoelder majorant: K=.. [p=..] [R=..]")
    ex.add_argument("--smale", nargs="+", metavar="KEY=VALUE", help="Smale majorant: gamma=..")
    g.add_argument("--lambda", dest="lam", type=float, default=1.0, help="strong-regularity modulus (default 1)")

    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("text", "csv"), default="text")
    fmt.add_argument("--output", "-o", help="write the report here instead of stdout")

    run = argparse.ArgumentParser(add_help=False)
    run.add_argument("--x0", type=_numbers, help="comma-separated start point, fractions allowed (use --x0=-1,2 for negatives)")
    run.add_argument("--max-iter", type=int, default=50)
    run.add_argument("--tol", type=float, default=1e-10, help="natural-residual tolerance")
    run.add_argument("--exact", action="store_true", help="rational arithmetic (zero-map problems only)")

    sampling = argparse.ArgumentParser(add_help=False)
    sampling.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sampling.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)

    parser = argparse.ArgumentParser(prog="geqn", description="Newton's method for generalized equations.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("radii", parents=[spec, fmt], help="convergence and uniqueness radii")
    p.add_argument("--kappa", type=float, default=math.inf)
    p.add_argument("--method", choices=("auto", "closed", "bisection"), default="auto")
    p.set_defaults(func=cmd_radii)

    p = sub.add_parser("sequence", parents=[spec, fmt], help="majorizing sequence t_k")
    p.add_argument("--t0", type=float, required=True)
    p.add_argument("--k-max", type=int, default=50)
    p.set_defaults(func=cmd_sequence)

    p = sub.add_parser("solve", parents=[spec, fmt, run], help="run Newton and print the trace")
    p.add_argument("--problem", required=True, help="registry name or path to a .geqn file")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("certify", parents=[spec, fmt, run, sampling], help="certify a run against a majorant")
    p.add_argument("--problem", required=True)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("lcp", parents=[fmt], help="solve the LCP of an affine orthant problem")
    p.add_argument("--problem", required=True)
    p.add_argument("--method", choices=("lemke", "enumerate"), default="lemke")
    p.set_defaults(func=cmd_lcp)

    p = sub.add_parser("bench", parents=[fmt, sampling], help="certify every registered pair")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("extremal", parents=[spec, fmt, run], help="run the sharpness witness for a majorant")
    p.add_argument("--match-tol", type=float, default=1e-9, help="allowed | |x_k| - t_k | per step")
    p.set_defaults(func=cmd_extremal)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    buf = io.StringIO()
    try:
        code = args.func(args, buf)
    except (UsageError, ProblemFormatError, FileNotFoundError, ValueError) as exc:
        print(f"geqn: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GeqnError as exc:
        print(f"geqn: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())
