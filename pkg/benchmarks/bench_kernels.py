"""Time the compiled and pure Python kernels on the same inputs.

Run with ``python benchmarks/bench_kernels.py [--repeat N] [--sizes 2,4,8]``.
Each row reports microseconds per call for LU factor+solve and Lemke on
seeded SPD LCPs, and checks that both backends agree.
"""

import argparse
import timeit

import numpy as np

from geqn import kernels


def spd_lcp(n, rng):
    A = rng.standard_normal((n, n))
    return A @ A.T + n * np.eye(n), rng.standard_normal(n)


def run(sizes, repeat, seed=0):
    backends = kernels.backends()
    rng = np.random.default_rng(seed)
    rows = []
    for n in sizes:
        M, q = spd_lcp(n, rng)
        timings, outputs = {}, {}
        for name, mod in backends.items():
            def lu_call(mod=mod):
                lu, piv, _ = mod.lu_factor(M, 1e-12)
                return mod.lu_solve(lu, piv, q)

            def lemke_call(mod=mod):
                return mod.lemke(M, q, 10 * 2**n, 1e-12)

            outputs[name] = (lu_call(), lemke_call()[1])
            timings[name] = (
                min(timeit.repeat(lu_call, number=repeat, repeat=3)) / repeat * 1e6,
                min(timeit.repeat(lemke_call, number=repeat, repeat=3)) / repeat * 1e6,
            )
        ref = outputs["python"]
        gap = max(
            max(float(np.max(np.abs(np.asarray(out[i]) - np.asarray(ref[i])))) for i in (0, 1))
            for out in outputs.values()
        )
        rows.append((n, timings, gap))
    return rows


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="2,4,8,16,32")
    parser.add_argument("--repeat", type=int, default=200)
    args = parser.parse_args(argv)
    sizes = [int(s) for s in args.sizes.split(",")]
    names = list(kernels.backends())
    print(f"active backend: {kernels.BACKEND}")
    header = f"{'n':>4}" + "".join(f"  {nm + ' lu':>14}  {nm + ' lemke':>16}" for nm in names) + "  max|diff|"
    print(header)
    for n, timings, gap in run(sizes, args.repeat):
        cells = "".join(f"  {timings[nm][0]:14.1f}  {timings[nm][1]:16.1f}" for nm in names)
        print(f"{n:>4}{cells}  {gap:.1e}")
    if "compiled" in names:
        print("times in microseconds per call; speedup = python / compiled")


if __name__ == "__main__":
    main()
